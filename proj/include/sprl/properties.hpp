#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace sprl {

struct PropertyResult {
    std::string name;
    bool pass = false;
    std::string detail;
};

/// Sizes for the verification suite. Defaults match the documented protocol;
/// tests shrink them to exercise the plumbing quickly.
struct VerifyOptions {
    int prop1_triples = 100000;
    int grad_probes = 100;
    int noise_samples = 10000;
    int selection_instances = 50;
    bool run_fig4 = true;
    int fig4_train_samples = 1000;
    int fig4_ce_epochs = 100;
    int fig4_resistance_epochs = 200;
    std::uint64_t seed = 12345;
};

/// Train a small classifier on uniformly random labels with plain CE, then
/// with the resistance loss alone; returns the final epoch's mean resistance
/// objective (which should settle at ln c).
double resistance_asymptote_run(int train_samples, int classes, int ce_epochs,
                                int resistance_epochs, std::uint64_t seed);

/// One PropertyResult per registered property, in a fixed order.
std::vector<PropertyResult> run_verify_suite(const VerifyOptions& opts);

void print_verify_report(const std::vector<PropertyResult>& results);

}  // namespace sprl
