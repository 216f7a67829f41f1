#pragma once

#include "discretediag/bootstrap.hpp"
#include "discretediag/stat_tests.hpp"

#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

namespace discretediag
{

/// Two-segment operating-characteristics study. Segment 1 is DAR(1) with
/// marginal p; segment 2 is DAR(1) with marginal beta*p + (1-beta)*q.
struct StudyGrid
{
    std::vector<std::size_t> lengths{10, 100, 1000, 10000};
    std::vector<double> phis{0.0, 0.25, 0.5, 0.75};
    std::vector<double> betas{0.0, 0.3, 0.5, 0.7, 0.8, 0.85, 0.9, 0.94, 0.96, 1.0};
    std::vector<double> p{0.25, 0.3, 0.45};
    std::vector<double> q{0.75, 0.05, 0.2};
    std::size_t replications = 1000;
    double alpha = 0.05;
    std::vector<Method> methods{std::begin(kAllMethods), std::end(kAllMethods)};
    std::size_t boot_replicates = 1000;
    NullModel null_model = NullModel::Pooled;
    std::uint64_t seed = 0;
    unsigned parallelism = 1;

    /// N = 500, B = 200, t <= 1000: minutes rather than hours.
    static StudyGrid desk_scale();
    void validate() const;
    std::size_t cell_count() const { return lengths.size() * phis.size() * betas.size(); }
};

struct MethodTally
{
    Method method = Method::Weiss;
    std::size_t evaluated = 0;
    std::size_t rejected = 0;
    std::size_t failures = 0;
    std::vector<double> p_values;  // per replicate, NaN where evaluation failed

    double reject_rate() const;
    double nonreject_rate() const { return 1.0 - reject_rate(); }
};

struct StudyCell
{
    std::size_t length = 0;
    double phi = 0.0;
    double beta = 0.0;
    std::vector<MethodTally> tallies;  // grid.methods order

    const MethodTally& tally(Method method) const;
};

struct StudyResult
{
    StudyGrid grid;
    std::vector<StudyCell> cells;  // length-major, then phi, then beta

    const StudyCell& cell(std::size_t length, double phi, double beta) const;
};

/// Deterministic for a given grid and seed, whatever the parallelism.
/// Replicate r of cell c draws its data from stream (seed, c * N + r).
StudyResult run_study(const StudyGrid& grid);

/// Pearson correlation of paired samples; NaN when either side is constant.
double pearson_correlation(std::span<const double> x, std::span<const double> y);

enum class MethodFamily
{
    Frequency,   // Hangartner, Weiss, DARBOOT, MCBOOT
    Transition,  // Billingsley, BillingsleyBOOT
};

MethodFamily family_of(Method method);
std::string_view to_string(MethodFamily family);

struct Concordance
{
    std::size_t length = 0;
    double phi = 0.0;
    MethodFamily family = MethodFamily::Frequency;
    Method first = Method::Weiss;
    Method second = Method::Weiss;
    double rho = 0.0;
    std::size_t pairs = 0;
};

/// Correlation of p-values between methods of the same family, per
/// (length, phi), pooling the replicates of every beta in the result.
std::vector<Concordance> concordance(const StudyResult& result);

struct BenchGrid
{
    std::vector<std::size_t> chains{2, 4, 6, 8, 10};
    std::vector<std::size_t> categories{2, 4, 6, 8, 10};
    std::vector<std::size_t> lengths{10, 100, 1000, 10000};
    std::size_t repetitions = 100;
    std::size_t boot_replicates = 200;
    std::vector<Method> methods{std::begin(kAllMethods), std::end(kAllMethods)};
    double phi = 0.5;
    std::uint64_t seed = 0;
};

struct BenchRow
{
    Method method = Method::Weiss;
    std::size_t chains = 0;
    std::size_t categories = 0;
    std::size_t length = 0;
    std::size_t repetitions = 0;
    std::size_t failures = 0;
    double median_seconds = 0.0;
    double mean_seconds = 0.0;
    double min_seconds = 0.0;
    double max_seconds = 0.0;
};

/// Wall time of each method on chains simulated from DAR(1) with a uniform
/// marginal. Evaluations run single-threaded.
std::vector<BenchRow> run_bench(const BenchGrid& grid);

} // namespace discretediag
