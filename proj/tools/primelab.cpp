#include "primelab/commands.hpp"
#include "primelab/config.hpp"
#include "primelab/errors.hpp"

#include <iostream>
#include <map>
#include <string>
#include <vector>

extern char** environ;

int main(int argc, char** argv) {
    std::vector<std::string> args(argv + 1, argv + argc);
    std::map<std::string, std::string> env;
    for (char** e = environ; e && *e; ++e) {
        const std::string kv = *e;
        if (const auto eq = kv.find('='); eq != std::string::npos) env.emplace(kv.substr(0, eq), kv.substr(eq + 1));
    }
    primelab::RunConfig cfg;
    try {
        cfg = primelab::parse_config(args, env);
    } catch (const primelab::HelpRequested& h) {
        std::cout << h.text;
        return primelab::kExitOk;
    } catch (const primelab::UsageError& e) {
        std::cerr << "usage error (" << e.key() << "): " << e.what() << "\nrun 'primelab --help' for usage\n";
        return primelab::kExitUsage;
    }
    return primelab::run(cfg, std::cout, std::cerr);
}
