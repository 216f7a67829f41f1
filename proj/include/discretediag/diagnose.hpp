#pragma once

#include "discretediag/bootstrap.hpp"
#include "discretediag/chain_model.hpp"
#include "discretediag/stat_tests.hpp"

#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace discretediag
{

enum class Mode
{
    Between,
    Within,
};

std::string_view to_string(Mode mode);
std::optional<Mode> parse_mode(std::string_view name);

inline constexpr double kDefaultWindowFraction = 0.30;
inline constexpr std::size_t kDefaultCheckpoints = 20;
/// Sequential checkpoints shorter than this are skipped.
inline constexpr std::size_t kMinPrefix = 50;
/// Evaluations on segments shorter than this add a low-power report warning.
inline constexpr std::size_t kShortSegment = 100;

struct DiagnosticRequest
{
    Method method = Method::Weiss;
    Mode mode = Mode::Between;
    double window_fraction = kDefaultWindowFraction;
    std::size_t checkpoint_count = kDefaultCheckpoints;
    /// Explicit prefix lengths for sequential runs; overrides checkpoint_count.
    std::vector<std::size_t> checkpoints;
    double alpha = 0.05;
    BootstrapConfig bootstrap;

    void validate() const;
};

struct Evaluation
{
    std::string unit;                        // "all" or the chain name
    std::optional<std::size_t> checkpoint;  // prefix length, sequential runs only
    TestOutcome outcome;
    bool reject = false;                     // p < alpha

    bool operator==(const Evaluation&) const = default;
};

struct DiagnosticReport
{
    Method method = Method::Weiss;
    Mode mode = Mode::Between;
    bool sequential = false;
    double alpha = 0.05;
    double window_fraction = kDefaultWindowFraction;
    BootstrapConfig bootstrap;
    std::vector<Evaluation> evaluations;
    std::vector<std::string> warnings;

    bool operator==(const DiagnosticReport& other) const;
};

/// Runs one procedure on a segment set.
TestOutcome evaluate(const SegmentSet& set, Method method, const BootstrapConfig& cfg);

/// One test across all chains.
DiagnosticReport run_between(const SegmentSet& chains, const DiagnosticRequest& req);
/// Head-versus-tail test per chain.
DiagnosticReport run_within(const SegmentSet& chains, const DiagnosticRequest& req);
/// Between-chain test on growing prefixes.
DiagnosticReport run_sequential(const SegmentSet& chains, const DiagnosticRequest& req);

/// floor(k * length / count) for k = 1..count.
std::vector<std::size_t> checkpoint_grid(std::size_t length, std::size_t count);

} // namespace discretediag
