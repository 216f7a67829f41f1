#include "discretediag/error.hpp"
#include "discretediag/simulate.hpp"
#include "discretediag/stat_tests.hpp"

#include "../support/gamma_oracle.hpp"

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

using namespace discretediag;

namespace
{
SegmentSet one_based(std::vector<std::vector<int>> segs, std::size_t r)
{
    for (auto& s : segs)
        for (auto& x : s)
            --x;
    return SegmentSet(CategoryAlphabet::indexed(r), std::move(segs));
}

// Transition statistic as a sum of per-source-state contingency tables,
// sum (observed - expected)^2 / expected with expected = f_j^(i) * pooled_jk.
double transition_statistic_oracle(const SegmentSet& set)
{
    const std::size_t r = set.categories();
    std::vector<std::vector<std::vector<double>>> obs(set.count(), std::vector<std::vector<double>>(r, std::vector<double>(r, 0)));
    for (std::size_t i = 0; i < set.count(); ++i)
        for (std::size_t t = 1; t < set.length(i); ++t)
            obs[i][static_cast<std::size_t>(set.segment(i)[t - 1])][static_cast<std::size_t>(set.segment(i)[t])] += 1;
    double x2 = 0.0;
    for (std::size_t j = 0; j < r; ++j)
    {
        std::vector<double> col(r, 0.0);
        double grand = 0.0;
        for (std::size_t i = 0; i < set.count(); ++i)
            for (std::size_t k = 0; k < r; ++k)
            {
                col[k] += obs[i][j][k];
                grand += obs[i][j][k];
            }
        for (std::size_t i = 0; i < set.count(); ++i)
        {
            const double row = std::accumulate(obs[i][j].begin(), obs[i][j].end(), 0.0);
            for (std::size_t k = 0; k < r; ++k)
            {
                if (col[k] == 0.0)
                    continue;
                const double expected = row * col[k] / grand;
                if (expected > 0.0)
                    x2 += (obs[i][j][k] - expected) * (obs[i][j][k] - expected) / expected;
            }
        }
    }
    return x2;
}

SegmentSet random_set(std::mt19937_64& gen, int segments)
{
    std::uniform_int_distribution<int> r_dist(2, 5), n_dist(5, 60);
    const int r = r_dist(gen);
    std::uniform_int_distribution<int> v(0, r - 1);
    std::vector<Sequence> segs(static_cast<std::size_t>(segments));
    for (auto& seg : segs)
    {
        seg.resize(static_cast<std::size_t>(n_dist(gen)));
        for (auto& x : seg)
            x = v(gen);
    }
    return SegmentSet(CategoryAlphabet::indexed(static_cast<std::size_t>(r)), std::move(segs));
}
} // namespace

TEST_CASE("Pearson statistic of the 2x2 example")
{
    const auto x2 = pearson_statistic(frequency_table(one_based({{1, 1, 1, 2}, {1, 2, 2, 2}}, 2)));
    CHECK(std::fabs(x2.statistic - 2.0) <= 1e-12);
    CHECK(x2.df == 1);
}

TEST_CASE("Pearson statistic is zero for identical proportions")
{
    const auto x2 = pearson_statistic(frequency_table(one_based({{1, 2, 3, 1}, {3, 1, 1, 2}}, 3)));
    CHECK(x2.statistic == 0.0);
    CHECK(x2.df == 2);
}

TEST_CASE("Pearson statistic with a single pooled category")
{
    const auto freq = frequency_table(one_based({{1, 1, 1, 1}, {1, 1, 1, 1}}, 2));
    const auto x2 = pearson_statistic(freq);
    CHECK(x2.degenerate);
    CHECK(x2.statistic == 0.0);
    CHECK(x2.df == 0);

    const auto h = hangartner_test(freq);
    CHECK(h.p_value == 1.0);
    CHECK(h.df == 0);
    CHECK(h.has_warning(Warning::DegenerateSupport));
    CHECK(h.has_warning(Warning::ZeroDf));
}

TEST_CASE("Pearson statistic needs two segments")
{
    CHECK_THROWS_AS(pearson_statistic(frequency_table(one_based({{1, 2}}, 2))), DataError);
}

TEST_CASE("Hangartner p-value from the chi-squared(1) tail")
{
    const auto h = hangartner_test(frequency_table(one_based({{1, 1, 1, 2}, {1, 2, 2, 2}}, 2)));
    CHECK(h.method == Method::Hangartner);
    CHECK(std::fabs(h.p_value - oracle::chi2_1_sf(2.0)) <= 1e-12);
    CHECK(std::fabs(h.p_value - 0.1573) <= 1e-4);
    CHECK_FALSE(h.replicates.has_value());

    const auto zero = hangartner_test(frequency_table(one_based({{1, 2, 2, 1}, {2, 1, 1, 2}}, 2)));
    CHECK(zero.statistic == 0.0);
    CHECK(zero.p_value == 1.0);
}

TEST_CASE("kappa hat of a short sequence by hand")
{
    // pairs (1,1), (1,2), (2,2): p_11 = p_22 = 1/3; sum p_j^2 = 1/2
    const double k = kappa_hat(one_based({{1, 1, 2, 2}}, 2), 1);
    CHECK(std::fabs(k - (1.0 + 0.25 - (1.0 / 3.0) / 0.5)) <= 1e-12);
    CHECK(std::fabs(k - 0.5833333333333333) <= 1e-12);
}

TEST_CASE("kappa hat rejects constant data and bad lags")
{
    CHECK_THROWS_AS(kappa_hat(one_based({{2, 2, 2}, {2, 2}}, 3), 1), InsufficientVariationError);
    CHECK_THROWS_AS(estimate_dar1(one_based({{1, 1, 1}, {1, 1, 1}}, 2)), InsufficientVariationError);
    CHECK_THROWS_AS(kappa_hat(one_based({{1, 2, 1}}, 2), 3), DataError);
    CHECK_THROWS_AS(kappa_hat(one_based({{1, 2, 1}}, 2), 0), DataError);
}

TEST_CASE("DAR(1) inflation factor")
{
    CHECK(dar1_inflation(0.0) == 1.0);
    CHECK(dar1_inflation(0.5) == 3.0);
}

TEST_CASE("estimate clamps phi outside the unit interval")
{
    // Each segment is constant, so lag-1 agreement is perfect: kappa = 1 + 1/4.
    const auto est = estimate_dar1(one_based({{1, 1}, {2, 2}}, 2));
    CHECK(est.kappa_lags.at(1) == doctest::Approx(1.25));
    CHECK(est.phi_hat == kPhiClamp);
    CHECK(est.clamped);
    CHECK(est.c_hat == dar1_inflation(kPhiClamp));

    const auto w = weiss_test(one_based({{1, 1}, {2, 2}}, 2));
    CHECK(w.has_warning(Warning::ClampedPhi));
}

TEST_CASE("estimate reports marginals")
{
    const auto set = one_based({{1, 1, 2, 2}, {1, 2, 2, 2}}, 2);
    const auto est = estimate_dar1(set);
    CHECK(est.c_hat == doctest::Approx((1 + est.phi_hat) / (1 - est.phi_hat)).epsilon(1e-15));
    CHECK(est.segment_marginals[0] == std::vector<double>{0.5, 0.5});
    CHECK(est.segment_marginals[1] == std::vector<double>{0.25, 0.75});
    CHECK(est.pooled_marginal == std::vector<double>{0.375, 0.625});
}

TEST_CASE("Weiss statistic is the Pearson statistic over c hat")
{
    std::mt19937_64 gen(3);
    for (int trial = 0; trial < 50; ++trial)
    {
        const auto set = random_set(gen, 3);
        const auto freq = frequency_table(set);
        const auto h = hangartner_test(freq);
        const auto w = weiss_test(set);
        const double c = dar1_inflation(std::clamp(kappa_hat(set, 1), -kPhiClamp, kPhiClamp));
        CHECK(w.statistic == doctest::Approx(h.statistic / c).epsilon(1e-14));
        CHECK(w.df == h.df);
    }
}

TEST_CASE("dividing by c = 1 reproduces the Hangartner outcome")
{
    const auto freq = frequency_table(one_based({{1, 1, 2, 3, 3}, {2, 2, 1, 3, 1}}, 3));
    const auto h = hangartner_test(freq);
    const auto w = asymptotic_outcome(Method::Weiss, h.statistic / dar1_inflation(0.0), *h.df);
    CHECK(w.statistic == h.statistic);
    CHECK(w.p_value == h.p_value);
}

TEST_CASE("Weiss closed-form chi-squared(2) value")
{
    const auto w = asymptotic_outcome(Method::Weiss, 6.0 / 3.0, 2);
    CHECK(w.statistic == 2.0);
    CHECK(std::fabs(w.p_value - std::exp(-1.0)) <= 1e-14);
}

TEST_CASE("Weiss on degenerate support")
{
    const auto w = weiss_test(one_based({{1, 1, 1}, {1, 1}}, 2));
    CHECK(w.p_value == 1.0);
    CHECK(w.df == 0);
    CHECK(w.has_warning(Warning::DegenerateSupport));
}

TEST_CASE("Billingsley statistic is zero for identical transition counts")
{
    const auto x2 = billingsley_statistic(transition_table(one_based({{1, 2, 2, 1, 1}, {1, 2, 2, 1, 1}}, 2)));
    CHECK(x2.statistic == 0.0);
}

TEST_CASE("Billingsley degrees of freedom")
{
    const auto full = billingsley_statistic(transition_table(one_based({{1, 1, 2, 2, 1}, {1, 2, 2, 1, 1}}, 2)));
    CHECK(full.df == 2);

    // Segment 2 never visits state 2, so a_2 = 1 and row 2 adds nothing.
    const auto partial = billingsley_statistic(transition_table(one_based({{1, 2, 2, 1}, {1, 1, 1, 1}}, 2)));
    CHECK(partial.df == 1);

    const auto none = billingsley_test(transition_table(one_based({{1, 1}, {1, 1}}, 1)));
    CHECK(none.df == 0);
    CHECK(none.p_value == 1.0);
    CHECK(none.has_warning(Warning::ZeroDf));
}

TEST_CASE("Billingsley statistic agrees with the contingency-table route")
{
    std::mt19937_64 gen(99);
    for (int trial = 0; trial < 100; ++trial)
    {
        const auto set = random_set(gen, 2 + trial % 3);
        const auto x2 = billingsley_statistic(transition_table(set));
        CHECK(x2.statistic == doctest::Approx(transition_statistic_oracle(set)).epsilon(1e-12));
    }
}

TEST_CASE("Billingsley p-value at the chi-squared(2) 5% point")
{
    const auto b = asymptotic_outcome(Method::Billingsley, 5.991465, 2);
    CHECK(std::fabs(b.p_value - 0.05) <= 1e-6);
}

TEST_CASE("Pearson statistic is invariant to relabeling and reordering")
{
    std::mt19937_64 gen(5);
    for (int trial = 0; trial < 100; ++trial)
    {
        const auto set = random_set(gen, 2 + trial % 4);
        const double base = pearson_statistic(frequency_table(set)).statistic;

        std::vector<int> relabel(set.categories());
        std::iota(relabel.begin(), relabel.end(), 0);
        std::shuffle(relabel.begin(), relabel.end(), gen);
        auto segs = set.segments();
        for (auto& s : segs)
            for (auto& x : s)
                x = relabel[static_cast<std::size_t>(x)];
        std::shuffle(segs.begin(), segs.end(), gen);
        const double moved = pearson_statistic(frequency_table(SegmentSet(set.alphabet(), segs))).statistic;
        CHECK(moved == doctest::Approx(base).epsilon(1e-12));
    }
}

TEST_CASE("kappa hat on long DAR(1) chains approaches phi^m")
{
    // Monte Carlo oracle: the spread over independent chains gives the
    // standard error of a single estimate.
    const std::vector<double> p{0.25, 0.3, 0.45};
    constexpr int kChains = 30;
    constexpr std::size_t kLength = 100000;
    for (double phi : {0.5, 0.75})
    {
        std::vector<std::vector<double>> estimates(4);
        for (int c = 0; c < kChains; ++c)
        {
            auto rng = derive_stream(1234, static_cast<std::uint64_t>(c));
            const SegmentSet set(CategoryAlphabet::indexed(3), {simulate_dar1(Dar1Params{p, phi}, kLength, rng)});
            for (std::size_t m = 1; m <= 3; ++m)
                estimates[m].push_back(kappa_hat(set, m));
        }
        for (std::size_t m = 1; m <= 3; ++m)
        {
            const auto& e = estimates[m];
            const double mean = std::accumulate(e.begin(), e.end(), 0.0) / kChains;
            double ss = 0.0;
            for (double x : e)
                ss += (x - mean) * (x - mean);
            const double se = std::sqrt(ss / (kChains - 1));
            const double target = std::pow(phi, static_cast<double>(m));
            CHECK(std::fabs(e.front() - target) <= 3.0 * se);
            CHECK(std::fabs(mean - target) <= 3.0 * se / std::sqrt(double(kChains)));
        }
    }
}

TEST_CASE("kappa hat of an i.i.d. sequence is near zero")
{
    const std::vector<double> p{0.25, 0.25, 0.25, 0.25};
    std::vector<double> estimates;
    for (int c = 0; c < 30; ++c)
    {
        auto rng = derive_stream(77, static_cast<std::uint64_t>(c));
        const SegmentSet set(CategoryAlphabet::indexed(4), {simulate_dar1(Dar1Params{p, 0.0}, 20000, rng)});
        estimates.push_back(kappa_hat(set, 1));
    }
    const double mean = std::accumulate(estimates.begin(), estimates.end(), 0.0) / 30.0;
    double ss = 0.0;
    for (double x : estimates)
        ss += (x - mean) * (x - mean);
    const double se = std::sqrt(ss / 29.0);
    CHECK(std::fabs(estimates.front()) <= 3.0 * se);
}

TEST_CASE("Weiss test holds its size on same-model DAR(1) segments")
{
    const std::vector<double> p{0.25, 0.3, 0.45};
    int rejections = 0;
    constexpr int kReps = 500;
    for (int rep = 0; rep < kReps; ++rep)
    {
        auto rng = derive_stream(2024, static_cast<std::uint64_t>(rep));
        auto a = simulate_dar1(Dar1Params{p, 0.5}, 10000, rng);
        auto b = simulate_dar1(Dar1Params{p, 0.5}, 10000, rng);
        const auto w = weiss_test(SegmentSet(CategoryAlphabet::indexed(3), {std::move(a), std::move(b)}));
        rejections += w.p_value < 0.05 ? 1 : 0;
    }
    const double rate = double(rejections) / kReps;
    CHECK(rate >= 0.02);
    CHECK(rate <= 0.10);
}

TEST_CASE("method and warning names round-trip")
{
    for (Method m : kAllMethods)
        CHECK(parse_method(to_string(m)) == m);
    for (Warning w : {Warning::DegenerateSupport, Warning::ClampedPhi, Warning::ZeroDf})
        CHECK(parse_warning(to_string(w)) == w);
    CHECK_FALSE(parse_method("gelman").has_value());
}
