#include "discretediag/diagnose.hpp"

#include "discretediag/error.hpp"

#include <algorithm>

namespace discretediag
{

std::string_view to_string(Mode mode)
{
    return mode == Mode::Between ? "between" : "within";
}

std::optional<Mode> parse_mode(std::string_view name)
{
    if (name == "between")
        return Mode::Between;
    if (name == "within")
        return Mode::Within;
    return std::nullopt;
}

void DiagnosticRequest::validate() const
{
    if (!(window_fraction > 0.0 && window_fraction < 0.5))
        throw DataError("window fraction must lie in (0, 0.5)");
    if (checkpoint_count < 1)
        throw DataError("checkpoint count must be at least 1");
    if (!(alpha > 0.0 && alpha < 1.0))
        throw DataError("alpha must lie in (0, 1)");
    if (bootstrap.replicates < 1)
        throw DataError("bootstrap replicates must be at least 1");
}

bool DiagnosticReport::operator==(const DiagnosticReport& other) const
{
    // Bootstrap parallelism is an execution detail and never changes results.
    return method == other.method && mode == other.mode && sequential == other.sequential && alpha == other.alpha
           && window_fraction == other.window_fraction && bootstrap.replicates == other.bootstrap.replicates
           && bootstrap.seed == other.bootstrap.seed && bootstrap.null_model == other.bootstrap.null_model
           && evaluations == other.evaluations && warnings == other.warnings;
}

TestOutcome evaluate(const SegmentSet& set, Method method, const BootstrapConfig& cfg)
{
    switch (method)
    {
    case Method::Hangartner:
        return hangartner_test(frequency_table(set));
    case Method::Weiss:
        return weiss_test(set);
    case Method::DarBoot:
        return darboot_test(set, cfg);
    case Method::McBoot:
        return mcboot_test(set, cfg);
    case Method::Billingsley:
        return billingsley_test(transition_table(set));
    case Method::BillingsleyBoot:
        return billingsley_boot_test(set, cfg);
    }
    throw DataError("unknown method");
}

namespace
{

DiagnosticReport make_report(const DiagnosticRequest& req, Mode mode, bool sequential)
{
    DiagnosticReport report;
    report.method = req.method;
    report.mode = mode;
    report.sequential = sequential;
    report.alpha = req.alpha;
    report.window_fraction = req.window_fraction;
    report.bootstrap = req.bootstrap;
    return report;
}

Evaluation make_evaluation(DiagnosticReport& report, std::string unit, std::optional<std::size_t> checkpoint,
                           TestOutcome outcome, std::size_t shortest)
{
    if (shortest < kShortSegment)
    {
        std::string where = unit;
        if (checkpoint)
            where += " at checkpoint " + std::to_string(*checkpoint);
        report.warnings.push_back(where + ": segments shorter than " + std::to_string(kShortSegment)
                                  + " points, low power");
    }
    const bool reject = outcome.p_value < report.alpha;
    return Evaluation{std::move(unit), checkpoint, std::move(outcome), reject};
}

} // namespace

DiagnosticReport run_between(const SegmentSet& chains, const DiagnosticRequest& req)
{
    req.validate();
    if (chains.count() < 2)
        throw DataError("between mode needs >= 2 chains");
    auto report = make_report(req, Mode::Between, false);
    report.evaluations.push_back(
        make_evaluation(report, "all", std::nullopt, evaluate(chains, req.method, req.bootstrap), chains.min_length()));
    return report;
}

DiagnosticReport run_within(const SegmentSet& chains, const DiagnosticRequest& req)
{
    req.validate();
    for (std::size_t i = 0; i < chains.count(); ++i)
    {
        try
        {
            within_windows(chains.length(i), req.window_fraction);
        }
        catch (const DataError& e)
        {
            throw DataError("chain " + chains.name(i) + ": " + e.what());
        }
    }
    auto report = make_report(req, Mode::Within, false);
    for (std::size_t i = 0; i < chains.count(); ++i)
    {
        const auto windows = split_within(chains.segment(i), chains.alphabet(), req.window_fraction);
        TestOutcome outcome;
        try
        {
            outcome = evaluate(windows, req.method, req.bootstrap);
        }
        catch (const InsufficientVariationError& e)
        {
            throw InsufficientVariationError("chain " + chains.name(i) + ": " + e.what());
        }
        report.evaluations.push_back(
            make_evaluation(report, chains.name(i), std::nullopt, std::move(outcome), windows.min_length()));
    }
    return report;
}

std::vector<std::size_t> checkpoint_grid(std::size_t length, std::size_t count)
{
    if (count == 0)
        throw DataError("checkpoint count must be at least 1");
    std::vector<std::size_t> grid;
    grid.reserve(count);
    for (std::size_t k = 1; k <= count; ++k)
        grid.push_back(k * length / count);
    return grid;
}

DiagnosticReport run_sequential(const SegmentSet& chains, const DiagnosticRequest& req)
{
    req.validate();
    if (chains.count() < 2)
        throw DataError("between mode needs >= 2 chains");
    const std::size_t shortest = chains.min_length();
    auto checkpoints = req.checkpoints.empty() ? checkpoint_grid(shortest, req.checkpoint_count) : req.checkpoints;
    std::sort(checkpoints.begin(), checkpoints.end());
    checkpoints.erase(std::unique(checkpoints.begin(), checkpoints.end()), checkpoints.end());
    if (!checkpoints.empty() && checkpoints.back() > shortest)
        throw DataError("checkpoint " + std::to_string(checkpoints.back()) + " exceeds chain length "
                        + std::to_string(shortest));

    auto report = make_report(req, Mode::Between, true);
    for (std::size_t cp : checkpoints)
    {
        if (cp < kMinPrefix)
        {
            report.warnings.push_back("checkpoint " + std::to_string(cp) + " skipped: prefix shorter than "
                                      + std::to_string(kMinPrefix));
            continue;
        }
        const auto head = prefix(chains, cp);
        report.evaluations.push_back(make_evaluation(report, "all", cp, evaluate(head, req.method, req.bootstrap), cp));
    }
    if (report.evaluations.empty())
        throw DataError("no checkpoint has a prefix of at least " + std::to_string(kMinPrefix));
    return report;
}

} // namespace discretediag
