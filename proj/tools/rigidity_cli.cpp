#include <CLI11.hpp>

#include <iostream>

#include "rigidity/errors.hpp"
#include "rigidity/pipeline.hpp"

using namespace rigidity;

int main(int argc, char** argv) {
    CLI::App app{
        "rigidity: certified construction of simultaneous-approximation "
        "sequences, witness polynomials and atomic measure towers"};
    app.require_subcommand(1);

    std::string config_path;
    std::string out_dir;
    long stages = 0, length = 0, pmax = 0, digits_cap = 0;
    int threads = -1;

    auto add_common = [&](CLI::App* cmd) {
        cmd->add_option("--config", config_path, "configuration file (JSON)");
        cmd->add_option("--out", out_dir, "output directory");
        cmd->add_option("--stages", stages, "approximation stages per base");
        cmd->add_option("--length", length, "interleaved sequence length");
        cmd->add_option("--pmax", pmax, "measure tower height");
        cmd->add_option("--digits-cap", digits_cap,
                        "decimal precision hard cap");
        cmd->add_option("--threads", threads, "worker threads (0 = auto)");
    };

    CLI::App* build_seq =
        app.add_subcommand("build-seq", "build the interleaved sequence");
    CLI::App* build_measure =
        app.add_subcommand("build-measure", "build the measure tower");
    CLI::App* verify =
        app.add_subcommand("verify", "run every verification check");
    CLI::App* witness =
        app.add_subcommand("witness-poly", "build certified witness polynomials");
    CLI::App* report =
        app.add_subcommand("report", "produce all artifacts, plots and summary");
    for (CLI::App* cmd : {build_seq, build_measure, verify, witness, report})
        add_common(cmd);

    long witness_l = 0;
    witness->add_option("--l", witness_l, "build only this exclusion level");

    CLI11_PARSE(app, argc, argv);

    try {
        RunConfig cfg;
        if (!config_path.empty()) cfg = load_config_file(config_path);
        if (!out_dir.empty()) cfg.out_dir = out_dir;
        if (stages > 0) cfg.sequence.stages = stages;
        if (length > 0) cfg.sequence.length = length;
        if (pmax > 0) cfg.p_max = pmax;
        if (digits_cap > 0) cfg.digit_cap = digits_cap;
        if (threads >= 0) cfg.threads = threads;
        if (witness_l >= 2) cfg.witness_l = {witness_l};
        validate(cfg);

        if (app.got_subcommand(build_seq)) cmd_build_seq(cfg);
        if (app.got_subcommand(build_measure)) cmd_build_measure(cfg);
        if (app.got_subcommand(witness)) cmd_witness(cfg);
        if (app.got_subcommand(verify)) cmd_verify(cfg);
        if (app.got_subcommand(report)) cmd_report(cfg);
        return 0;
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return e.exit_code();
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
