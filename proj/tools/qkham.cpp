// qkham: run simulations, verify the structure algebra, dump matrices.
//
//   qkham run <config.json> [--tolerance-scale S] [--symplectic-sweep]
//   qkham run --batch <dir> [--tolerance-scale S]
//   qkham verify --n <int>
//   qkham dump --what <structure|omega> --label <F|G|H> --n <int> [--space <tangent|cotangent>]

#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "qkham/run.hpp"

int main(int argc, char** argv) {
    CLI::App app{"Hamiltonian flows on the flat quaternion Kaehler model space R^{4n}"};
    app.require_subcommand(1);

    double tolerance_scale = 1.0;
    app.add_option("--tolerance-scale", tolerance_scale, "Multiplier on diagnostic thresholds")
        ->check(CLI::PositiveNumber);

    auto* run_cmd = app.add_subcommand("run", "Integrate a config and write CSV / JSON artifacts");
    run_cmd->fallthrough();
    std::string config_path;
    std::string batch_dir;
    bool sweep = false;
    auto* config_opt = run_cmd->add_option("config", config_path, "Simulation config (JSON)");
    auto* batch_opt = run_cmd->add_option("--batch", batch_dir, "Run every *.json in a directory concurrently");
    config_opt->excludes(batch_opt);
    run_cmd->add_flag("--symplectic-sweep", sweep, "Probe symplecticity at every step instead of the first");

    auto* verify_cmd = app.add_subcommand("verify", "Check quaternion relations and metric compatibility");
    int verify_n = 1;
    bool corrupt_h = false;
    verify_cmd->add_option("--n", verify_n, "Block size n")->required()->check(CLI::PositiveNumber);
    // Test-only negative control.
    verify_cmd->add_flag("--corrupt-h", corrupt_h)->group("");

    auto* dump_cmd = app.add_subcommand("dump", "Print a structure or symplectic matrix as integer CSV");
    std::string what;
    std::string label = "F";
    std::string space = "tangent";
    int dump_n = 1;
    dump_cmd->add_option("--what", what)->required()->check(CLI::IsMember({"structure", "omega"}));
    dump_cmd->add_option("--label", label)->required()->check(CLI::IsMember({"F", "G", "H"}));
    dump_cmd->add_option("--n", dump_n)->required()->check(CLI::PositiveNumber);
    dump_cmd->add_option("--space", space)->check(CLI::IsMember({"tangent", "cotangent"}));

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? qkham::kExitOk : qkham::kExitFailure;
    }

    try {
        if (*run_cmd) {
            qkham::RunOptions options;
            options.tolerance_scale = tolerance_scale;
            options.symplectic_sweep = sweep;
            if (!batch_dir.empty()) return qkham::run_batch(batch_dir, options, std::cout);
            if (config_path.empty()) {
                std::cerr << "run: expected a config path or --batch <dir>\n";
                return qkham::kExitFailure;
            }
            return qkham::run_config_file(config_path, options, std::cout);
        }
        if (*verify_cmd) return qkham::verify(verify_n, corrupt_h, std::cout);
        if (*dump_cmd) {
            qkham::dump(what, qkham::parse_label(label), dump_n, qkham::parse_space(space), std::cout);
            return qkham::kExitOk;
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return qkham::kExitFailure;
    }
    return qkham::kExitFailure;
}
