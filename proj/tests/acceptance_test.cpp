// Acceptance suite: one pass/fail line per criterion, nonzero exit on any
// failure. Heavier end-to-end runs live here rather than in the unit tests.
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "sprl/experiment.hpp"
#include "sprl/noise.hpp"
#include "sprl/properties.hpp"
#include "sprl/trainer.hpp"

using namespace sprl;
namespace fs = std::filesystem;

namespace {

int g_failures = 0;

void report(int criterion, bool pass, const std::string& what) {
    std::printf("%s criterion %2d: %s\n", pass ? "PASS" : "FAIL", criterion, what.c_str());
    std::fflush(stdout);
    if (!pass) ++g_failures;
}

std::string fmt(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.4f", v);
    return buf;
}

struct RunStats {
    double last10 = 0.0;
    double max = 0.0;
};

RunStats stats_of(const TrainResult& r) {
    RunStats s;
    s.last10 = last10_average(r.history);
    for (const auto& m : r.history) s.max = std::max(s.max, m.test_accuracy);
    return s;
}

TrainConfig benchmark_config(std::uint64_t seed) {
    TrainConfig cfg;
    cfg.pace.total_epochs = 200;
    cfg.pace.warmup_epochs = 20;
    cfg.pace.subset_count = 10;
    cfg.pace.resistance_scale = 100.0;
    cfg.batch_size = 128;
    cfg.learning_rate = 1e-3;
    cfg.seed = seed;
    cfg.hidden_sizes = {64, 64};
    return cfg;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

}  // namespace

int main() {
    const std::uint64_t seed = 7;
    const auto t_start = std::chrono::steady_clock::now();

    // 1. Resistance-loss asymptote: CE for 100 epochs, resistance alone for
    //    200 more on 1000 uniformly random labels; final objective near ln 10.
    {
        const double loss = resistance_asymptote_run(1000, 10, 100, 200, 12345);
        const double target = 2.302585092994046;
        report(1, std::abs(loss - target) <= 0.05,
               "resistance asymptote: final objective " + fmt(loss) + " vs ln 10 = " +
                   fmt(target) + " (tolerance 0.05)");
    }

    // 2-6 come from the shared verification suite at its documented sizes.
    {
        VerifyOptions opts;
        opts.run_fig4 = false;  // criterion 1 already ran the full protocol
        const auto results = run_verify_suite(opts);
        std::map<std::string, PropertyResult> by_name;
        for (const auto& r : results) by_name[r.name] = r;

        const auto& prop1 = by_name.at("prop1_three_cases");
        report(2, prop1.pass, "proposition-1 enumeration: " + prop1.detail);

        bool grads_ok = true;
        std::string grad_detail;
        for (const char* name : {"grad_cross_entropy", "grad_resistance", "grad_sprl_combined",
                                 "grad_kd", "grad_label_smooth", "grad_bootstrap"}) {
            const auto& r = by_name.at(name);
            grads_ok = grads_ok && r.pass;
            if (!r.pass) grad_detail += std::string(" ") + name;
        }
        report(3, grads_ok,
               grads_ok ? "analytic gradients of all six losses within 1e-5 of central "
                          "differences (100 probes each)"
                        : "gradient checks failed:" + grad_detail);

        const auto& sym = by_name.at("noise_symmetric_rate");
        const auto& pair = by_name.at("noise_pair_structure");
        report(4, sym.pass && pair.pass, sym.detail + "; " + pair.detail);

        const auto& sel = by_name.at("selection_oracle");
        report(5, sel.pass, "selection vs brute-force sort: " + sel.detail);

        const auto& sched = by_name.at("schedule_oracle");
        report(6, sched.pass, "pace/weight schedules vs direct evaluation: " + sched.detail);
    }

    // 7-9. The noisy blobs benchmark: c=4, d=20, n=2000, symmetric eps=0.5.
    Dataset noisy = make_blobs(2000, 4, 20, 1.5, seed);
    noisy.train_noisy_labels =
        apply_noise(noisy.train_true_labels, symmetric_matrix(4, 0.5), seed);
    TrainConfig cfg = benchmark_config(seed);

    cfg.method = Method::standard;
    const RunStats std_noisy = stats_of(train(cfg, noisy));
    cfg.method = Method::sprl;
    const RunStats sprl_noisy = stats_of(train(cfg, noisy));

    report(7, std_noisy.max - std_noisy.last10 >= 0.10 &&
                  sprl_noisy.max - sprl_noisy.last10 <= 0.03 &&
                  sprl_noisy.last10 - std_noisy.last10 >= 0.10,
           "no-deterioration: standard max " + fmt(std_noisy.max) + " vs last10 " +
               fmt(std_noisy.last10) + " (drop >= 0.10); sprl max " + fmt(sprl_noisy.max) +
               " vs last10 " + fmt(sprl_noisy.last10) + " (gap <= 0.03); sprl lead " +
               fmt(sprl_noisy.last10 - std_noisy.last10) + " (>= 0.10)");

    // 8. Clean-data non-regression on the same blobs without corruption.
    {
        const Dataset clean = make_blobs(2000, 4, 20, 1.5, seed);
        TrainConfig c = benchmark_config(seed);
        c.method = Method::standard;
        const RunStats s_std = stats_of(train(c, clean));
        c.method = Method::sprl;
        const RunStats s_sprl = stats_of(train(c, clean));
        report(8, s_sprl.last10 >= s_std.last10 - 0.02,
               "clean data: sprl last10 " + fmt(s_sprl.last10) + " vs standard " +
                   fmt(s_std.last10) + " (within 0.02)");
    }

    // 9. Substituting KD or label smoothing for the resistance term must not
    //    improve on it under identical seeds and schedules.
    {
        cfg.method = Method::kd;
        const RunStats kd = stats_of(train(cfg, noisy));
        cfg.method = Method::label_smooth;
        const RunStats lsr = stats_of(train(cfg, noisy));
        report(9, sprl_noisy.last10 >= kd.last10 && sprl_noisy.last10 >= lsr.last10,
               "loss substitution: sprl " + fmt(sprl_noisy.last10) + " >= kd " +
                   fmt(kd.last10) + " and >= label_smooth " + fmt(lsr.last10));
    }

    // 10. Model-generated noise: a weak model labels everything; training on
    //     those labels, sprl must beat standard and the weak model itself.
    {
        Dataset ds = make_blobs(2000, 10, 20, 0.7, seed);
        TrainConfig weak = benchmark_config(seed);
        weak.method = Method::standard;
        weak.pace.total_epochs = 60;
        weak.pace.warmup_epochs = 30;
        const ModelNoiseResult mn = model_generated_noise(ds, 0.10, weak, seed);
        ds.train_noisy_labels = mn.noisy_labels;

        TrainConfig c = benchmark_config(seed);
        c.method = Method::standard;
        const RunStats s_std = stats_of(train(c, ds));
        c.method = Method::sprl;
        const RunStats s_sprl = stats_of(train(c, ds));
        report(10, s_sprl.last10 >= s_std.last10 + 0.02 &&
                       s_sprl.last10 > mn.weak_test_accuracy,
               "model-generated noise (rate " + fmt(mn.realized_noise_rate) + "): sprl " +
                   fmt(s_sprl.last10) + " vs standard " + fmt(s_std.last10) +
                   " (+0.02) and weak model " + fmt(mn.weak_test_accuracy));
    }

    // 11. Determinism: identical invocations yield byte-identical CSVs.
    {
        const fs::path out1 = fs::temp_directory_path() / "sprl_accept_a";
        const fs::path out2 = fs::temp_directory_path() / "sprl_accept_b";
        fs::remove_all(out1);
        fs::remove_all(out2);
        ExperimentOptions o;
        o.blobs_total = 500;
        o.blobs_classes = 4;
        o.blobs_dim = 10;
        o.blobs_separation = 1.5;
        o.noise = "symmetric";
        o.rate = 0.5;
        o.methods = {"sprl", "standard"};
        o.epochs = 30;
        o.t1 = 5;
        o.k = 5;
        o.gamma_d = 10.0;
        o.batch = 64;
        o.hidden = {16};
        o.seed = 1;
        o.emit_schedules = true;
        o.out_dir = out1.string();
        run_experiment(o);
        o.out_dir = out2.string();
        run_experiment(o);

        bool identical = true;
        std::string which;
        for (const char* name : {"sprl_epochs.csv", "standard_epochs.csv", "noisy_labels.csv",
                                 "delta_schedule.csv", "gamma_schedule.csv"}) {
            if (slurp(out1 / name) != slurp(out2 / name)) {
                identical = false;
                which += std::string(" ") + name;
            }
        }
        report(11, identical,
               identical ? "repeated seeded experiment produced byte-identical CSV output"
                         : "byte differences in:" + which);
        fs::remove_all(out1);
        fs::remove_all(out2);
    }

    const auto elapsed = std::chrono::duration_cast<std::chrono::seconds>(
                             std::chrono::steady_clock::now() - t_start)
                             .count();
    std::printf("%d/11 criteria passed in %llds\n", 11 - g_failures,
                static_cast<long long>(elapsed));
    return g_failures == 0 ? 0 : 1;
}
