#include <filesystem>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "proboost/errors.hpp"
#include "proboost/experiment.hpp"

namespace {

using proboost::ExperimentConfig;

// exit codes: 0 ok, 1 internal error, 2 missing input, 3 invalid config
constexpr int kExitOk = 0;
constexpr int kExitInternal = 1;
constexpr int kExitMissingInput = 2;
constexpr int kExitInvalidConfig = 3;

struct CommonFlags {
    std::string config_path;
    std::uint64_t seed = 0;
    std::size_t reps = 0;
    std::string variant;
    std::size_t levels = 0;
    std::string learner;
    std::string weights;
    std::string out;
};

void add_common_flags(CLI::App* cmd, CommonFlags& flags) {
    cmd->add_option("--config", flags.config_path, "JSON experiment config file");
    cmd->add_option("--seed", flags.seed, "base seed");
    cmd->add_option("--reps", flags.reps, "repetitions");
    cmd->add_option("--variant", flags.variant, "boost variant: under|over|weighted");
    cmd->add_option("--levels", flags.levels, "number of levels V");
    cmd->add_option("--learner", flags.learner, "learner family: det|vi|mcd");
    cmd->add_option("--weights", flags.weights, "ensemble weights: fw|vw|vwo");
    cmd->add_option("--out", flags.out, "output directory");
}

ExperimentConfig resolve_config(const CLI::App* cmd, const CommonFlags& flags) {
    ExperimentConfig cfg;
    if (!flags.config_path.empty()) cfg = proboost::load_config_file(flags.config_path);
    if (cmd->count("--seed")) cfg.base_seed = flags.seed;
    if (cmd->count("--reps")) cfg.repetitions = flags.reps;
    if (cmd->count("--variant")) cfg.variant = flags.variant;
    if (cmd->count("--levels")) cfg.levels = flags.levels;
    if (cmd->count("--learner")) cfg.learner.family = flags.learner;
    if (cmd->count("--weights")) cfg.weights = flags.weights;
    if (cmd->count("--out")) cfg.out_dir = flags.out;
    return cfg;
}

void validate_config(const ExperimentConfig& cfg) {
    if (cfg.repetitions < 1) {
        throw proboost::InvalidParameter("repetitions must be >= 1");
    }
    proboost::boost_variant_from_name(cfg.variant);
    proboost::weight_scheme_from_name(cfg.weights);
    proboost::learner_mode_from_name(cfg.learner.family);
    if (cfg.levels < 1) throw proboost::InvalidParameter("levels must be >= 1");
    if (cfg.tau <= 0.0 || cfg.tau >= 1.0) {
        throw proboost::InvalidParameter("tau must be in (0, 1)");
    }
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"ProBoost: uncertainty-driven boosting of probabilistic classifiers"};
    app.require_subcommand(1);

    CommonFlags flags;

    auto* prepare = app.add_subcommand("prepare-data",
                                       "materialize the contaminated dataset cache");
    add_common_flags(prepare, flags);

    auto* train = app.add_subcommand("train",
                                     "run seeded train+evaluate repetitions for one cell");
    add_common_flags(train, flags);

    auto* evaluate = app.add_subcommand("evaluate",
                                        "evaluate a saved boosted model on the test split");
    add_common_flags(evaluate, flags);
    std::string model_dir;
    std::size_t eval_rep = 0;
    evaluate->add_option("--model", model_dir, "boosted model checkpoint directory")
        ->required();
    evaluate->add_option("--rep", eval_rep, "repetition whose data split to use");

    auto* report = app.add_subcommand("report", "summaries, ROI, and paired p-values");
    add_common_flags(report, flags);
    std::string baseline_cell;
    std::vector<std::string> treatment_cells;
    report->add_option("--baseline", baseline_cell, "baseline cell id")->required();
    report->add_option("--treatment", treatment_cells,
                       "treatment cell ids (default: every other cell)");

    auto* demo = app.add_subcommand("demo-iris", "the weighted-boosting Iris walkthrough");
    add_common_flags(demo, flags);
    std::string iris_csv = "data/iris.csv";
    demo->add_option("--iris", iris_csv, "path to the Iris CSV");

    CLI11_PARSE(app, argc, argv);

    try {
        if (prepare->parsed()) {
            const auto cfg = resolve_config(prepare, flags);
            validate_config(cfg);
            const std::string manifest = proboost::cmd_prepare_data(cfg);
            std::cout << "wrote " << manifest << "\n";
        } else if (train->parsed()) {
            const auto cfg = resolve_config(train, flags);
            validate_config(cfg);
            const auto records = proboost::cmd_train(cfg);
            std::cout << "cell " << proboost::cell_id(cfg) << ": " << records.size()
                      << " repetitions recorded under " << cfg.out_dir << "/records\n";
        } else if (evaluate->parsed()) {
            const auto cfg = resolve_config(evaluate, flags);
            validate_config(cfg);
            const auto metrics = proboost::cmd_evaluate(cfg, model_dir, eval_rep);
            std::cout << "acc " << metrics.acc << "  sen " << metrics.sen << "  spe "
                      << metrics.spe << "  ppv " << metrics.ppv << "  npv "
                      << metrics.npv << "  auc " << metrics.auc << "\n";
        } else if (report->parsed()) {
            const auto cfg = resolve_config(report, flags);
            std::cout << proboost::cmd_report(cfg.out_dir, baseline_cell,
                                              treatment_cells);
        } else if (demo->parsed()) {
            const auto cfg = resolve_config(demo, flags);
            const std::string trace =
                (std::filesystem::path(cfg.out_dir) / "iris_trace.csv").string();
            const auto result = proboost::cmd_demo_iris(iris_csv, cfg.base_seed, trace);
            std::cout << "wrote " << trace << "\n";
            std::cout << "weight increments per transition:";
            for (std::size_t inc : result.increments_per_level) std::cout << ' ' << inc;
            std::cout << "\nclass-0 weights stayed at one: "
                      << (result.class0_untouched ? "yes" : "no") << "\n";
        }
    } catch (const proboost::FormatError& e) {
        std::cerr << "missing or malformed input: " << e.what() << "\n";
        return kExitMissingInput;
    } catch (const proboost::DataError& e) {
        std::cerr << "data error: " << e.what() << "\n";
        return kExitMissingInput;
    } catch (const proboost::InvalidParameter& e) {
        std::cerr << "invalid config: " << e.what() << "\n";
        return kExitInvalidConfig;
    } catch (const proboost::UnsupportedConfiguration& e) {
        std::cerr << "invalid config: " << e.what() << "\n";
        return kExitInvalidConfig;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitInternal;
    }
    return kExitOk;
}
