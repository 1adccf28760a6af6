#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "fbx/broker.hpp"

int main(int argc, char** argv) {
    CLI::App app{"Minimal XMPP broker"};
    uint16_t port = 5222;
    std::string accounts_path;
    app.add_option("--port", port, "listen port (default 5222)");
    app.add_option("--accounts", accounts_path,
                   "account file, one 'bareJid password' per line")
        ->required();
    CLI11_PARSE(app, argc, argv);

    std::vector<fbx::xmpp::Account> accounts;
    std::ifstream in(accounts_path);
    if (!in) {
        std::cerr << "error: cannot open " << accounts_path << "\n";
        return 1;
    }
    std::string line;
    size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        std::istringstream fields(line);
        std::string jid, password;
        if (!(fields >> jid))
            continue;  // blank line
        if (jid.front() == '#')
            continue;
        if (!(fields >> password)) {
            std::cerr << "error: " << accounts_path << ":" << lineno
                      << ": expected 'bareJid password'\n";
            return 1;
        }
        try {
            accounts.push_back({fbx::xmpp::Jid::parse(jid), password});
        } catch (const fbx::xmpp::JidError& e) {
            std::cerr << "error: " << accounts_path << ":" << lineno << ": "
                      << e.what() << "\n";
            return 1;
        }
    }

    try {
        fbx::xmpp::Broker broker(port, accounts);
        std::cout << "listening " << broker.port() << "\n" << std::flush;
        // serve until stdin closes or 'quit' arrives
        std::string command;
        while (std::getline(std::cin, command))
            if (command == "quit")
                break;
        broker.stop();
        return 0;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
