#include <fstream>
#include <iostream>

#include "CLI11.hpp"
#include "fbx/bench.hpp"

int main(int argc, char** argv) {
    CLI::App app{"communication benchmark harness"};
    app.require_subcommand(1);
    app.fallthrough();

    std::string transport = "udp";
    std::string pattern = "async";
    std::string out_path;
    size_t n = 200;
    int minutes = 10;
    app.add_option("--transport", transport, "udp | tcp | xmpp");
    app.add_option("--pattern", pattern, "async | sync");
    app.add_option("--n", n, "measured transfers (latency)");
    app.add_option("--minutes", minutes, "soak duration in minutes");
    app.add_option("--out", out_path, "write the report to a file");

    CLI::App* payload = app.add_subcommand(
        "payload", "bytes per transferred value, all transports");
    CLI::App* latency =
        app.add_subcommand("latency", "transfer latency, all transports");
    CLI::App* soak = app.add_subcommand(
        "soak", "long-running resident-memory trend for one transport");
    CLI11_PARSE(app, argc, argv);

    try {
        std::string report;
        if (payload->parsed()) {
            report = fbx::bench::payload_report();
        } else if (latency->parsed()) {
            report = fbx::bench::latency_report(n);
        } else if (soak->parsed()) {
            fbx::bench::SoakResult result = fbx::bench::soak_run(
                minutes, fbx::bench::parse_transport(transport));
            report = fbx::bench::soak_report(result);
        }
        if (!out_path.empty()) {
            std::ofstream out(out_path);
            if (!out) {
                std::cerr << "error: cannot write " << out_path << "\n";
                return 1;
            }
            out << report;
        }
        std::cout << report;
        return 0;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
