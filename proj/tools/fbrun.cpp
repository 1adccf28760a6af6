#include <fstream>
#include <iostream>

#include "CLI11.hpp"
#include "fbx/runner.hpp"

int main(int argc, char** argv) {
    CLI::App app{"IEC 61499-style device runner"};
    std::string net_path;
    std::string device;
    std::string script_path;
    bool tolerate = false;
    app.add_option("--net", net_path, "network definition file")->required();
    app.add_option("--device", device, "device name to run")->required();
    app.add_flag("--tolerate-init-errors", tolerate,
                 "keep running when a SIFB fails to initialize");
    app.add_option("--script", script_path,
                   "run REPL commands from a file instead of stdin");
    CLI11_PARSE(app, argc, argv);

    try {
        fbx::core::NetworkDecl doc = fbx::app::load_netdef(net_path);
        fbx::app::DeviceRunner runner(doc, device, tolerate);
        for (const std::string& failure : runner.init_failures())
            std::cerr << "init: " << failure << "\n";
        std::cout << "ready " << device << "\n" << std::flush;

        if (!script_path.empty()) {
            std::ifstream script(script_path);
            if (!script) {
                std::cerr << "error: cannot open " << script_path << "\n";
                return 1;
            }
            runner.run_repl(script, std::cout);
        } else {
            runner.run_repl(std::cin, std::cout);
        }
        return 0;
    } catch (const fbx::app::RunnerError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
