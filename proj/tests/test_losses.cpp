#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>

#include "doctest.h"
#include "sprl/losses.hpp"
#include "sprl/rng.hpp"

using namespace sprl;

namespace {

constexpr double kLn10 = 2.302585092994046;
constexpr double kLn2 = 0.6931471805599453;

std::vector<double> simplex(SplitRng& rng, int c) {
    std::vector<double> v(c);
    double sum = 0.0;
    for (double& x : v) {
        x = -std::log(1.0 - rng.uniform());
        sum += x;
    }
    for (double& x : v) x /= sum;
    return v;
}

}  // namespace

TEST_CASE("cross entropy basics") {
    CHECK(cross_entropy(std::vector<double>{1.0, 0.0}, 0).value == 0.0);
    const std::vector<double> uniform10(10, 0.1);
    CHECK(cross_entropy(uniform10, 3).value == doctest::Approx(kLn10).epsilon(1e-12));
    CHECK(cross_entropy(std::vector<double>{0.5, 0.5}, 1).value ==
          doctest::Approx(kLn2).epsilon(1e-12));
    CHECK_THROWS_AS(cross_entropy(uniform10, 10), std::invalid_argument);
    CHECK_THROWS_AS(cross_entropy(uniform10, -1), std::invalid_argument);
}

TEST_CASE("cross entropy gradient is -onehot/p") {
    const std::vector<double> p = {0.2, 0.5, 0.3};
    const ScalarLoss l = cross_entropy(p, 1);
    CHECK(l.grad[0] == 0.0);
    CHECK(l.grad[1] == doctest::Approx(-2.0));
    CHECK(l.grad[2] == 0.0);
}

TEST_CASE("resistance loss: uniform against uniform hits the ln c asymptote") {
    const std::vector<double> u(10, 0.1);
    CHECK(resistance_loss(u, u).value == doctest::Approx(kLn10).epsilon(1e-12));
}

TEST_CASE("resistance loss reduces to CE for a one-hot previous prediction") {
    const std::vector<double> prev = {0.0, 1.0};
    const std::vector<double> p = {0.5, 0.5};
    CHECK(resistance_loss(p, prev).value == doctest::Approx(kLn2).epsilon(1e-12));
}

TEST_CASE("resistance loss matches direct evaluation") {
    const std::vector<double> prev = {0.3, 0.7};
    const std::vector<double> p = {0.6, 0.4};
    const double direct = 0.3 * -std::log(0.6) + 0.7 * -std::log(0.4);
    const ScalarLoss l = resistance_loss(p, prev);
    CHECK(l.value == doctest::Approx(direct).epsilon(1e-15));
    CHECK(l.value == doctest::Approx(0.7946511994417057).epsilon(1e-12));
    CHECK(l.grad[0] == doctest::Approx(-0.3 / 0.6).epsilon(1e-15));
    CHECK(l.grad[1] == doctest::Approx(-0.7 / 0.4).epsilon(1e-15));
}

TEST_CASE("resistance gradient equals -prev/p elementwise on random pairs") {
    SplitRng rng(5, Stream::noise);
    for (int trial = 0; trial < 100; ++trial) {
        const int c = 2 + static_cast<int>(rng.uniform_below(9));
        const auto prev = simplex(rng, c);
        const auto p = simplex(rng, c);
        const ScalarLoss l = resistance_loss(p, prev);
        for (int j = 0; j < c; ++j)
            CHECK(l.grad[j] == doctest::Approx(-prev[j] / clamp_prob(p[j])).epsilon(1e-13));
        CHECK(l.value >= 0.0);
        CHECK(std::isfinite(l.value));
    }
}

TEST_CASE("prop1_step classifies and updates known instances") {
    // prev ratio 1 < cur ratio 1.5: case i, ratio shrinks
    {
        const Prop1Result r =
            prop1_step(std::vector<double>{0.5, 0.5}, std::vector<double>{0.6, 0.4}, 0.1, 0, 1);
        CHECK(r.which == Prop1Case::i);
        CHECK(r.next[0] / r.next[1] < 1.5);
    }
    // prev ratio 9 > 1.5^2: case ii, ratio grows but stays under 9
    {
        const Prop1Result r =
            prop1_step(std::vector<double>{0.9, 0.1}, std::vector<double>{0.6, 0.4}, 0.1, 0, 1);
        CHECK(r.which == Prop1Case::ii);
        const double ratio = r.next[0] / r.next[1];
        CHECK(ratio > 1.5);
        CHECK(ratio < 9.0);
    }
    CHECK_THROWS_AS(
        prop1_step(std::vector<double>{0.5, 0.5}, std::vector<double>{0.4, 0.6}, 0.1, 0, 1),
        std::invalid_argument);
}

TEST_CASE("prop1_update: single entry climbs toward 1") {
    const auto next = prop1_update(std::vector<double>{1.0}, std::vector<double>{0.5}, 0.1);
    CHECK(next[0] == doctest::Approx(0.7).epsilon(1e-15));
    CHECK(next[0] > 0.5);
}

TEST_CASE("prop1 enumeration: proposition inequalities hold on sampled triples") {
    SplitRng rng(17, Stream::noise);
    int checked = 0;
    for (int trial = 0; trial < 20000; ++trial) {
        const int c = 2 + static_cast<int>(rng.uniform_below(4));
        const auto prev = simplex(rng, c);
        const auto cur = simplex(rng, c);
        int j = static_cast<int>(rng.uniform_below(c));
        int k = static_cast<int>(rng.uniform_below(c - 1));
        if (k >= j) ++k;
        if (cur[j] == cur[k]) continue;
        if (cur[j] < cur[k]) std::swap(j, k);
        const double eta = 1.0 - rng.uniform();
        const Prop1Result r = prop1_step(prev, cur, eta, j, k);
        const double rc = cur[j] / cur[k];
        const double rp = prev[j] / prev[k];
        const double rn = r.next[j] / r.next[k];
        const double tol = 1e-12 * std::max({1.0, rc, rp, rn});
        switch (r.which) {
            case Prop1Case::i: CHECK(rn < rc + tol); break;
            case Prop1Case::ii:
                CHECK(rn > rc - tol);
                CHECK(rn < rp + tol);
                break;
            case Prop1Case::iii:
                CHECK(rn <= rc + tol);
                CHECK(rc <= rp + tol);
                break;
        }
        ++checked;
    }
    CHECK(checked > 19000);
}

TEST_CASE("prop1 iteration drives the designated ratio toward 1 without renormalizing") {
    // lagged iteration: (prev, cur) <- (cur, next), starting on the case-iii
    // boundary prev = cur
    std::vector<double> prev = {0.6, 0.4};
    std::vector<double> cur = prev;
    double ratio = cur[0] / cur[1];
    for (int step = 0; step < 200; ++step) {
        auto next = prop1_update(prev, cur, 0.1);
        prev = cur;
        cur = next;
        const double next_ratio = cur[0] / cur[1];
        CHECK(next_ratio <= ratio + 1e-12 * std::max(1.0, ratio));
        ratio = next_ratio;
    }
    CHECK(ratio < 1.05);
    CHECK(ratio >= 1.0);
}

TEST_CASE("kd loss: zero for identical distributions, nonnegative otherwise") {
    const std::vector<double> u(10, 0.1);
    CHECK(kd_loss(u, u).value == doctest::Approx(0.0));
    SplitRng rng(23, Stream::noise);
    for (int trial = 0; trial < 100; ++trial) {
        const auto prev = simplex(rng, 6);
        const auto p = simplex(rng, 6);
        const double v = kd_loss(p, prev).value;
        CHECK(v > 0.0);  // distinct distributions: strictly positive
        CHECK(std::isfinite(v));
    }
    const auto q = simplex(rng, 6);
    CHECK(kd_loss(q, q).value == doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("kd loss matches direct evaluation") {
    const std::vector<double> prev = {0.3, 0.7};
    const std::vector<double> p = {0.6, 0.4};
    const double direct = 0.3 * std::log(0.3 / 0.6) + 0.7 * std::log(0.7 / 0.4);
    const ScalarLoss l = kd_loss(p, prev);
    CHECK(l.value == doctest::Approx(direct).epsilon(1e-15));
    CHECK(l.value == doctest::Approx(0.1837868973868123).epsilon(1e-12));
    CHECK(l.grad[0] == doctest::Approx(-0.3 / 0.6).epsilon(1e-15));
}

TEST_CASE("label smoothing loss: zero iff uniform, finite near one-hot") {
    const std::vector<double> u = {0.5, 0.5};
    CHECK(label_smooth_loss(u).value == doctest::Approx(0.0));
    const ScalarLoss l = label_smooth_loss(std::vector<double>{0.9, 0.1});
    const double direct = 0.5 * std::log(0.5 / 0.9) + 0.5 * std::log(0.5 / 0.1);
    CHECK(l.value == doctest::Approx(direct).epsilon(1e-15));
    CHECK(l.value == doctest::Approx(0.5108256237659907).epsilon(1e-12));

    const ScalarLoss sharp = label_smooth_loss(std::vector<double>{1.0, 0.0});
    CHECK(std::isfinite(sharp.value));
    CHECK(sharp.value > 10.0);

    SplitRng rng(29, Stream::noise);
    for (int trial = 0; trial < 50; ++trial) {
        const auto p = simplex(rng, 5);
        CHECK(label_smooth_loss(p).value >= 0.0);
    }
}

TEST_CASE("bootstrap hard loss") {
    const std::vector<double> p = {0.7, 0.3};
    // beta = 1 reduces to plain CE on the noisy label
    CHECK(bootstrap_hard_loss(p, 1, 1.0).value ==
          doctest::Approx(cross_entropy(p, 1).value).epsilon(1e-15));
    // argmax agrees with the noisy label: CE for any beta
    CHECK(bootstrap_hard_loss(p, 0, 0.35).value ==
          doctest::Approx(cross_entropy(p, 0).value).epsilon(1e-15));
    // direct evaluation at the default beta
    const double direct = 0.8 * -std::log(0.3) + 0.2 * -std::log(0.7);
    const ScalarLoss l = bootstrap_hard_loss(p, 1, 0.8);
    CHECK(l.value == doctest::Approx(direct).epsilon(1e-15));
    CHECK(l.value == doctest::Approx(1.0345132322484954).epsilon(1e-12));
    CHECK_THROWS_AS(bootstrap_hard_loss(p, 1, 1.2), std::invalid_argument);
    CHECK_THROWS_AS(bootstrap_hard_loss(p, 1, -0.1), std::invalid_argument);
}

TEST_CASE("sprl batch loss: gamma 0 with everything selected is mean CE") {
    SplitRng rng(31, Stream::noise);
    for (int trial = 0; trial < 20; ++trial) {
        const int batch = 3 + static_cast<int>(rng.uniform_below(6));
        const int c = 2 + static_cast<int>(rng.uniform_below(5));
        DenseMatrix probs(batch, c), prev(batch, c);
        std::vector<int> labels(batch);
        for (int i = 0; i < batch; ++i) {
            const auto pi = simplex(rng, c);
            const auto qi = simplex(rng, c);
            std::copy(pi.begin(), pi.end(), probs.row(i).begin());
            std::copy(qi.begin(), qi.end(), prev.row(i).begin());
            labels[i] = static_cast<int>(rng.uniform_below(c));
        }
        const std::vector<std::uint8_t> ones(batch, 1);
        const BatchLoss bl = sprl_batch_loss(probs, prev, labels, ones, 0.0);
        double mean_ce = 0.0;
        for (int i = 0; i < batch; ++i) mean_ce += cross_entropy(probs.row(i), labels[i]).value;
        mean_ce /= batch;
        CHECK(bl.value == doctest::Approx(mean_ce).epsilon(1e-13));
    }
}

TEST_CASE("sprl batch loss: nothing selected leaves the batch-mean resistance term") {
    DenseMatrix probs(2, 2), prev(2, 2);
    probs.row(0)[0] = 0.6; probs.row(0)[1] = 0.4;
    probs.row(1)[0] = 0.2; probs.row(1)[1] = 0.8;
    prev.row(0)[0] = 0.5; prev.row(0)[1] = 0.5;
    prev.row(1)[0] = 0.1; prev.row(1)[1] = 0.9;
    const std::vector<int> labels = {0, 1};
    const std::vector<std::uint8_t> none(2, 0);
    const BatchLoss bl = sprl_batch_loss(probs, prev, labels, none, 1.0);
    const double expect = 0.5 * (resistance_loss(probs.row(0), prev.row(0)).value +
                                 resistance_loss(probs.row(1), prev.row(1)).value);
    CHECK(bl.value == doctest::Approx(expect).epsilon(1e-14));
}

TEST_CASE("sprl batch loss matches term-by-term manual arithmetic") {
    // B = 2, v = [1, 0], gamma = 0.5
    DenseMatrix probs(2, 2), prev(2, 2);
    probs.row(0)[0] = 0.7; probs.row(0)[1] = 0.3;
    probs.row(1)[0] = 0.4; probs.row(1)[1] = 0.6;
    prev.row(0)[0] = 0.6; prev.row(0)[1] = 0.4;
    prev.row(1)[0] = 0.5; prev.row(1)[1] = 0.5;
    const std::vector<int> labels = {1, 0};
    const std::vector<std::uint8_t> v = {1, 0};

    const double ce_term = -std::log(0.3);  // only sample 0 selected, sum v = 1
    const double res0 = 0.6 * -std::log(0.7) + 0.4 * -std::log(0.3);
    const double res1 = 0.5 * -std::log(0.4) + 0.5 * -std::log(0.6);
    const double expect = ce_term + 0.5 / 2.0 * (res0 + res1);

    const BatchLoss bl = sprl_batch_loss(probs, prev, labels, v, 0.5);
    CHECK(bl.value == doctest::Approx(expect).epsilon(1e-14));

    // gradient row 0: CE part -1/p on the label plus the weighted resistance part
    CHECK(bl.grad.at(0, 1) ==
          doctest::Approx(-1.0 / 0.3 + 0.25 * (-0.4 / 0.3)).epsilon(1e-12));
    // gradient row 1: resistance only
    CHECK(bl.grad.at(1, 0) == doctest::Approx(0.25 * (-0.5 / 0.4)).epsilon(1e-12));
    CHECK_THROWS_AS(sprl_batch_loss(probs, prev, labels, v, -0.1), std::invalid_argument);
}

TEST_CASE("prediction memory initialises to valid uniform rows") {
    const PredictionMemory m = PredictionMemory::uniform(4, 5);
    CHECK(m.epoch_tag == 0);
    for (int i = 0; i < 4; ++i) {
        double sum = 0.0;
        for (int j = 0; j < 5; ++j) sum += m.probs.at(i, j);
        CHECK(sum == doctest::Approx(1.0).epsilon(1e-15));
    }
}

TEST_CASE("losses stay finite and nonnegative under clamping") {
    const std::vector<double> with_zero = {1.0, 0.0, 0.0};
    const std::vector<double> prev = {0.2, 0.3, 0.5};
    CHECK(std::isfinite(cross_entropy(with_zero, 2).value));
    CHECK(cross_entropy(with_zero, 2).value > 0.0);
    CHECK(std::isfinite(resistance_loss(with_zero, prev).value));
    CHECK(std::isfinite(kd_loss(with_zero, prev).value));
    CHECK(std::isfinite(label_smooth_loss(with_zero).value));
    CHECK(std::isfinite(bootstrap_hard_loss(with_zero, 1, 0.8).value));
}
