#include "discretediag/bootstrap.hpp"

#include "discretediag/error.hpp"
#include "discretediag/parallel.hpp"
#include "discretediag/rng.hpp"
#include "discretediag/simulate.hpp"

#include <algorithm>

namespace discretediag
{

std::string_view to_string(NullModel model)
{
    return model == NullModel::Pooled ? "pooled" : "as-estimated";
}

std::optional<NullModel> parse_null_model(std::string_view name)
{
    if (name == "pooled")
        return NullModel::Pooled;
    if (name == "as-estimated")
        return NullModel::AsEstimated;
    return std::nullopt;
}

double bootstrap_pvalue(double observed, std::span<const double> replicates)
{
    if (replicates.empty())
        throw DataError("bootstrap p-value needs at least one replicate");
    const auto hits = std::count_if(replicates.begin(), replicates.end(), [&](double x) { return x >= observed; });
    return static_cast<double>(hits) / static_cast<double>(replicates.size());
}

double pearson_value(const SegmentSet& set)
{
    return pearson_statistic(frequency_table(set)).statistic;
}

namespace
{

double transition_value(const SegmentSet& set)
{
    return billingsley_statistic(transition_table(set)).statistic;
}

// Simulates replicate segment sets with the original count and lengths and
// records `statistic` for each. Replicate b draws only from stream (seed, b).
template <class Simulate, class Statistic>
BootstrapOutcome run_bootstrap(const SegmentSet& set, double observed, const BootstrapConfig& cfg,
                               Simulate&& simulate, Statistic&& statistic)
{
    if (cfg.replicates == 0)
        throw DataError("bootstrap needs at least one replicate");
    BootstrapOutcome out;
    out.observed = observed;
    out.replicate_statistics.resize(cfg.replicates);
    parallel_for(cfg.replicates, cfg.parallelism, [&](std::size_t b) {
        auto rng = derive_stream(cfg.seed, b);
        std::vector<Sequence> segments;
        segments.reserve(set.count());
        for (std::size_t i = 0; i < set.count(); ++i)
            segments.push_back(simulate(i, set.length(i), rng));
        out.replicate_statistics[b] = statistic(SegmentSet(set.alphabet(), std::move(segments)));
    });
    out.p_value = bootstrap_pvalue(observed, out.replicate_statistics);
    return out;
}

std::vector<double> segment_marginal(const FrequencyTable& freq, std::size_t i)
{
    std::vector<double> p(freq.categories);
    for (std::size_t j = 0; j < freq.categories; ++j)
        p[j] = freq.proportion(i, j);
    return p;
}

// Rows without observed transitions become self-loops.
std::vector<std::vector<double>> transition_matrix(const TransitionTable& trans, std::optional<std::size_t> segment)
{
    const std::size_t r = trans.categories;
    std::vector<std::vector<double>> m(r, std::vector<double>(r, 0.0));
    for (std::size_t j = 0; j < r; ++j)
    {
        const auto total = segment ? trans.row_total(*segment, j) : trans.pooled_row_totals[j];
        if (total == 0)
        {
            m[j][j] = 1.0;
            continue;
        }
        for (std::size_t k = 0; k < r; ++k)
        {
            const auto count = segment ? trans.count(*segment, j, k) : trans.pooled_counts[j * r + k];
            m[j][k] = static_cast<double>(count) / static_cast<double>(total);
        }
    }
    return m;
}

std::vector<MarkovParams> fit_markov(const SegmentSet& set, NullModel model)
{
    const auto freq = frequency_table(set);
    const auto trans = transition_table(set);
    std::vector<MarkovParams> fits;
    if (model == NullModel::Pooled)
    {
        MarkovParams pooled{transition_matrix(trans, std::nullopt), freq.pooled_proportions};
        pooled.validate();
        fits.assign(set.count(), pooled);
        return fits;
    }
    for (std::size_t i = 0; i < set.count(); ++i)
    {
        fits.push_back(MarkovParams{transition_matrix(trans, i), segment_marginal(freq, i)});
        fits.back().validate();
    }
    return fits;
}

template <class Statistic>
BootstrapOutcome markov_bootstrap(const SegmentSet& set, const BootstrapConfig& cfg, Statistic&& statistic)
{
    const auto fits = fit_markov(set, cfg.null_model);
    return run_bootstrap(
        set, statistic(set), cfg,
        [&](std::size_t i, std::size_t length, RngStream& rng) { return simulate_markov(fits[i], length, rng); },
        statistic);
}

TestOutcome to_outcome(Method method, const BootstrapOutcome& boot, const BootstrapConfig& cfg)
{
    TestOutcome out;
    out.method = method;
    out.statistic = boot.observed;
    out.replicates = static_cast<std::int64_t>(cfg.replicates);
    out.p_value = boot.p_value;
    return out;
}

} // namespace

BootstrapOutcome darboot(const SegmentSet& set, const BootstrapConfig& cfg)
{
    if (set.count() < 2)
        throw DataError("homogeneity test needs at least 2 segments");
    const auto est = estimate_dar1(set);
    // DAR(1) cannot express negative dependence; such fits simulate as i.i.d.
    const double phi = std::max(0.0, est.phi_hat);
    std::vector<Dar1Params> fits;
    for (std::size_t i = 0; i < set.count(); ++i)
    {
        fits.push_back(Dar1Params{cfg.null_model == NullModel::Pooled ? est.pooled_marginal : est.segment_marginals[i], phi});
        fits.back().validate();
    }
    return run_bootstrap(
        set, pearson_value(set), cfg,
        [&](std::size_t i, std::size_t length, RngStream& rng) { return simulate_dar1(fits[i], length, rng); },
        pearson_value);
}

BootstrapOutcome mcboot(const SegmentSet& set, const BootstrapConfig& cfg)
{
    if (set.count() < 2)
        throw DataError("homogeneity test needs at least 2 segments");
    return markov_bootstrap(set, cfg, pearson_value);
}

BootstrapOutcome billingsley_boot(const SegmentSet& set, const BootstrapConfig& cfg)
{
    if (set.count() < 2)
        throw DataError("homogeneity test needs at least 2 segments");
    return markov_bootstrap(set, cfg, transition_value);
}

TestOutcome darboot_test(const SegmentSet& set, const BootstrapConfig& cfg)
{
    const auto est = estimate_dar1(set);
    auto out = to_outcome(Method::DarBoot, darboot(set, cfg), cfg);
    if (est.clamped)
        out.warnings.push_back(Warning::ClampedPhi);
    return out;
}

TestOutcome mcboot_test(const SegmentSet& set, const BootstrapConfig& cfg)
{
    auto out = to_outcome(Method::McBoot, mcboot(set, cfg), cfg);
    if (frequency_table(set).support.size() <= 1)
        out.warnings.push_back(Warning::DegenerateSupport);
    return out;
}

TestOutcome billingsley_boot_test(const SegmentSet& set, const BootstrapConfig& cfg)
{
    auto out = to_outcome(Method::BillingsleyBoot, billingsley_boot(set, cfg), cfg);
    if (frequency_table(set).support.size() <= 1)
        out.warnings.push_back(Warning::DegenerateSupport);
    return out;
}

} // namespace discretediag
