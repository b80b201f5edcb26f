#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "sprl/experiment.hpp"
#include "sprl/properties.hpp"

namespace {

std::vector<std::string> split_list(const std::string& s) {
    std::vector<std::string> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ','))
        if (!item.empty()) out.push_back(item);
    return out;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Self-paced resistance learning on noisy labels"};
    app.require_subcommand(0, 1);

    sprl::ExperimentOptions opts;
    std::string methods = "sprl";
    std::string hidden = "64,64";
    double m_override = -1;
    double known_rate = -1;

    app.add_option("--dataset", opts.dataset, "blobs | idx | csv")->capture_default_str();
    app.add_option("--n", opts.blobs_total, "blobs: total samples before the 80/20 split")
        ->capture_default_str();
    app.add_option("--classes", opts.blobs_classes, "blobs: class count")->capture_default_str();
    app.add_option("--dim", opts.blobs_dim, "blobs: feature dimension")->capture_default_str();
    app.add_option("--separation", opts.blobs_separation, "blobs: center spread")
        ->capture_default_str();
    app.add_option("--idx-images", opts.idx_images, "IDX image file");
    app.add_option("--idx-labels", opts.idx_labels, "IDX label file");
    app.add_option("--limit", opts.limit, "keep only the first N samples (0 = all)");
    app.add_option("--csv-features", opts.csv_features, "feature CSV (header row)");
    app.add_option("--csv-labels", opts.csv_labels,
                   "label CSV; omit to use a 'label' column of the features file");
    app.add_option("--noise", opts.noise, "none | symmetric | pair | model")
        ->capture_default_str();
    app.add_option("--rate", opts.rate, "noise rate epsilon")->capture_default_str();
    app.add_option("--model-fraction", opts.model_fraction,
                   "model noise: labeled fraction for the weak model")
        ->capture_default_str();
    app.add_option("--model-epochs", opts.model_epochs, "model noise: weak model epochs")
        ->capture_default_str();
    app.add_option("--method", methods,
                   "comma list of sprl,standard,bootstrap,kd,label_smooth,spl")
        ->capture_default_str();
    app.add_option("--epochs", opts.epochs, "total epochs T")->capture_default_str();
    app.add_option("--t1", opts.t1, "warmup epochs T1")->capture_default_str();
    app.add_option("--k", opts.k, "curriculum subset count K")->capture_default_str();
    app.add_option("--gamma-d", opts.gamma_d, "resistance weight step gamma_d")
        ->capture_default_str();
    app.add_option("--m", m_override, "override the initial curriculum size m");
    app.add_option("--batch", opts.batch, "mini-batch size")->capture_default_str();
    app.add_option("--lr", opts.lr, "maximum learning rate")->capture_default_str();
    app.add_option("--seed", opts.seed, "experiment seed")->capture_default_str();
    app.add_option("--val-fraction", opts.val_fraction,
                   "carve a noisy validation split and report the best-validation epoch")
        ->capture_default_str();
    app.add_option("--out", opts.out_dir, "output directory")->capture_default_str();
    app.add_flag("--emit-schedules", opts.emit_schedules,
                 "write delta/gamma schedule CSVs");
    app.add_option("--hidden", hidden, "comma list of hidden widths (max 2, empty = linear)")
        ->capture_default_str();
    app.add_option("--activation", opts.activation, "relu | leaky_relu")->capture_default_str();
    app.add_option("--augment-sigma", opts.augment_sigma, "feature jitter magnitude")
        ->capture_default_str();
    app.add_option("--epsilon-known", known_rate, "noise rate when known (picks m directly)");
    app.add_option("--spl-lambda", opts.spl_lambda, "fixed threshold for the spl baseline")
        ->capture_default_str();
    app.add_option("--bootstrap-beta", opts.bootstrap_beta, "bootstrap mixing weight")
        ->capture_default_str();

    auto* verify = app.add_subcommand("verify", "run the property verification suite");
    std::uint64_t verify_seed = 12345;
    bool skip_fig4 = false;
    verify->add_option("--seed", verify_seed, "suite seed")->capture_default_str();
    verify->add_flag("--skip-asymptote", skip_fig4,
                     "skip the slow resistance-asymptote training run");

    CLI11_PARSE(app, argc, argv);

    try {
        if (verify->parsed()) {
            sprl::VerifyOptions vopts;
            vopts.seed = verify_seed;
            vopts.run_fig4 = !skip_fig4;
            const auto results = sprl::run_verify_suite(vopts);
            sprl::print_verify_report(results);
            int failures = 0;
            for (const auto& r : results) failures += r.pass ? 0 : 1;
            return failures == 0 ? 0 : 1;
        }

        opts.methods = split_list(methods);
        opts.hidden.clear();
        for (const auto& h : split_list(hidden)) opts.hidden.push_back(std::stoi(h));
        if (m_override >= 0) opts.m_override = static_cast<int>(m_override);
        if (known_rate >= 0) opts.known_rate = known_rate;
        sprl::run_experiment(opts);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    }
    return 0;
}
