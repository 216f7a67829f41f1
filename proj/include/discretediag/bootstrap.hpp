#pragma once

#include "discretediag/chain_model.hpp"
#include "discretediag/stat_tests.hpp"

#include <cstdint>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

namespace discretediag
{

/// Parameters the replicate chains are simulated from.
enum class NullModel
{
    /// One shared fit from the pooled segments (the homogeneity null).
    Pooled,
    /// A separate fit per segment, as in the itemized procedures.
    AsEstimated,
};

std::string_view to_string(NullModel model);
std::optional<NullModel> parse_null_model(std::string_view name);

struct BootstrapConfig
{
    std::size_t replicates = 1000;
    std::uint64_t seed = 0;
    unsigned parallelism = 1;  // worker threads; 0 = hardware concurrency
    NullModel null_model = NullModel::Pooled;

    bool operator==(const BootstrapConfig&) const = default;
};

struct BootstrapOutcome
{
    double observed = 0.0;
    std::vector<double> replicate_statistics;
    double p_value = 1.0;
};

/// Fraction of replicates with a statistic >= observed (ties count).
double bootstrap_pvalue(double observed, std::span<const double> replicates);

/// Pearson statistic of each replicate, simulated from a fitted DAR(1).
BootstrapOutcome darboot(const SegmentSet& set, const BootstrapConfig& cfg);
/// Pearson statistic of each replicate, simulated from fitted first-order
/// Markov chains.
BootstrapOutcome mcboot(const SegmentSet& set, const BootstrapConfig& cfg);
/// Transition statistic of each replicate, simulated from fitted first-order
/// Markov chains.
BootstrapOutcome billingsley_boot(const SegmentSet& set, const BootstrapConfig& cfg);

TestOutcome darboot_test(const SegmentSet& set, const BootstrapConfig& cfg);
TestOutcome mcboot_test(const SegmentSet& set, const BootstrapConfig& cfg);
TestOutcome billingsley_boot_test(const SegmentSet& set, const BootstrapConfig& cfg);

/// Pearson statistic of a segment set, 0 when the pooled support is a single
/// category.
double pearson_value(const SegmentSet& set);

} // namespace discretediag
