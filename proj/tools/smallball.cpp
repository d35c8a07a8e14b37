#include <iostream>
#include <string>
#include <vector>

#include "smallball/cli/config.hpp"
#include "smallball/cli/runner.hpp"

int main(int argc, char** argv) {
    using namespace smallball;
    std::vector<std::string> args(argv + 1, argv + argc);
    try {
        const cli::ExperimentConfig config = cli::parse_config(args);
        const cli::ResultTable table = cli::run_experiment(config);
        cli::write_output(config, table);
        return 0;
    } catch (const cli::HelpRequested& help) {
        std::cout << help.what();
        return 0;
    } catch (const cli::ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return 2;
    } catch (const DomainError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return 2;
    } catch (const cli::IoError& e) {
        std::cerr << "i/o error: " << e.what() << '\n';
        return 4;
    } catch (const Error& e) {
        std::cerr << "numeric error: " << e.what() << '\n';
        return 3;
    } catch (const std::bad_alloc&) {
        std::cerr << "numeric error: out of memory\n";
        return 3;
    }
}
