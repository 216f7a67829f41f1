#include "discretediag/sim_study.hpp"

#include "discretediag/diagnose.hpp"
#include "discretediag/error.hpp"
#include "discretediag/parallel.hpp"
#include "discretediag/rng.hpp"
#include "discretediag/simulate.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <numeric>

namespace discretediag
{

StudyGrid StudyGrid::desk_scale()
{
    StudyGrid grid;
    grid.lengths = {10, 100, 1000};
    grid.replications = 500;
    grid.boot_replicates = 200;
    return grid;
}

void StudyGrid::validate() const
{
    if (lengths.empty() || phis.empty() || betas.empty() || methods.empty())
        throw DataError("study grid: lengths, phis, betas and methods must be nonempty");
    validate_probabilities(p, "study p");
    validate_probabilities(q, "study q");
    if (p.size() != q.size())
        throw DataError("study grid: p and q must have the same length");
    for (auto t : lengths)
        if (t < 2)
            throw DataError("study grid: segment length must be at least 2");
    for (double phi : phis)
        if (!(phi >= 0.0 && phi < 1.0))
            throw DataError("study grid: phi must lie in [0, 1)");
    for (double beta : betas)
        if (!(beta >= 0.0 && beta <= 1.0))
            throw DataError("study grid: beta must lie in [0, 1]");
    if (replications == 0 || boot_replicates == 0)
        throw DataError("study grid: replications and bootstrap replicates must be positive");
    if (!(alpha > 0.0 && alpha < 1.0))
        throw DataError("study grid: alpha must lie in (0, 1)");
}

double MethodTally::reject_rate() const
{
    if (evaluated == 0)
        return std::numeric_limits<double>::quiet_NaN();
    return static_cast<double>(rejected) / static_cast<double>(evaluated);
}

const MethodTally& StudyCell::tally(Method method) const
{
    for (const auto& t : tallies)
        if (t.method == method)
            return t;
    throw DataError("method " + std::string(to_string(method)) + " not in study");
}

const StudyCell& StudyResult::cell(std::size_t length, double phi, double beta) const
{
    for (const auto& c : cells)
        if (c.length == length && c.phi == phi && c.beta == beta)
            return c;
    throw DataError("no study cell for the requested (t, phi, beta)");
}

StudyResult run_study(const StudyGrid& grid)
{
    grid.validate();
    StudyResult result;
    result.grid = grid;
    for (auto t : grid.lengths)
        for (double phi : grid.phis)
            for (double beta : grid.betas)
            {
                StudyCell cell{t, phi, beta, {}};
                for (Method m : grid.methods)
                    cell.tallies.push_back(
                        MethodTally{m, 0, 0, 0, std::vector<double>(grid.replications, std::numeric_limits<double>::quiet_NaN())});
                result.cells.push_back(std::move(cell));
            }

    const auto alphabet = CategoryAlphabet::indexed(grid.p.size());
    const std::size_t n = grid.replications;
    parallel_for(result.cells.size() * n, grid.parallelism, [&](std::size_t flat) {
        auto& cell = result.cells[flat / n];
        const std::size_t rep = flat % n;
        auto rng = derive_stream(grid.seed, flat);

        std::vector<double> mixed(grid.p.size());
        for (std::size_t j = 0; j < mixed.size(); ++j)
            mixed[j] = cell.beta * grid.p[j] + (1.0 - cell.beta) * grid.q[j];
        // Renormalize away rounding in the convex combination.
        const double total = std::accumulate(mixed.begin(), mixed.end(), 0.0);
        for (double& x : mixed)
            x /= total;

        auto first = simulate_dar1(Dar1Params{grid.p, cell.phi}, cell.length, rng);
        auto second = simulate_dar1(Dar1Params{mixed, cell.phi}, cell.length, rng);
        const SegmentSet set(alphabet, {std::move(first), std::move(second)});
        const BootstrapConfig cfg{grid.boot_replicates, rng(), 1, grid.null_model};

        for (auto& tally : cell.tallies)
        {
            try
            {
                tally.p_values[rep] = evaluate(set, tally.method, cfg).p_value;
            }
            catch (const DataError&)
            {
            }
            catch (const NumericalError&)
            {
            }
        }
    });

    for (auto& cell : result.cells)
        for (auto& tally : cell.tallies)
            for (double p : tally.p_values)
            {
                if (std::isnan(p))
                {
                    ++tally.failures;
                    continue;
                }
                ++tally.evaluated;
                if (p < grid.alpha)
                    ++tally.rejected;
            }
    return result;
}

double pearson_correlation(std::span<const double> x, std::span<const double> y)
{
    if (x.size() != y.size() || x.size() < 2)
        throw DataError("correlation needs two equal-length samples of size >= 2");
    const auto n = static_cast<double>(x.size());
    const double mx = std::accumulate(x.begin(), x.end(), 0.0) / n;
    const double my = std::accumulate(y.begin(), y.end(), 0.0) / n;
    double sxy = 0.0, sxx = 0.0, syy = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i)
    {
        const double dx = x[i] - mx;
        const double dy = y[i] - my;
        sxy += dx * dy;
        sxx += dx * dx;
        syy += dy * dy;
    }
    if (sxx == 0.0 || syy == 0.0)
        return std::numeric_limits<double>::quiet_NaN();
    return sxy / std::sqrt(sxx * syy);
}

MethodFamily family_of(Method method)
{
    return method == Method::Billingsley || method == Method::BillingsleyBoot ? MethodFamily::Transition
                                                                               : MethodFamily::Frequency;
}

std::string_view to_string(MethodFamily family)
{
    return family == MethodFamily::Frequency ? "frequency" : "transition";
}

std::vector<Concordance> concordance(const StudyResult& result)
{
    if (result.cells.empty())
        throw DataError("concordance: study has no retained p-values");
    const auto& methods = result.grid.methods;
    std::vector<Concordance> out;
    for (auto t : result.grid.lengths)
        for (double phi : result.grid.phis)
            for (std::size_t a = 0; a < methods.size(); ++a)
                for (std::size_t b = a + 1; b < methods.size(); ++b)
                {
                    if (family_of(methods[a]) != family_of(methods[b]))
                        continue;
                    std::vector<double> xs, ys;
                    for (const auto& cell : result.cells)
                    {
                        if (cell.length != t || cell.phi != phi)
                            continue;
                        const auto& pa = cell.tallies[a].p_values;
                        const auto& pb = cell.tallies[b].p_values;
                        for (std::size_t r = 0; r < pa.size(); ++r)
                        {
                            if (std::isnan(pa[r]) || std::isnan(pb[r]))
                                continue;
                            xs.push_back(pa[r]);
                            ys.push_back(pb[r]);
                        }
                    }
                    Concordance c{t, phi, family_of(methods[a]), methods[a], methods[b],
                                  std::numeric_limits<double>::quiet_NaN(), xs.size()};
                    if (xs.size() >= 2)
                        c.rho = pearson_correlation(xs, ys);
                    out.push_back(c);
                }
    return out;
}

std::vector<BenchRow> run_bench(const BenchGrid& grid)
{
    std::vector<BenchRow> rows;
    if (grid.repetitions == 0)
        return rows;
    std::uint64_t stream = 0;
    for (auto chains : grid.chains)
        for (auto categories : grid.categories)
            for (auto length : grid.lengths)
            {
                const std::vector<double> p(categories, 1.0 / static_cast<double>(categories));
                const auto alphabet = CategoryAlphabet::indexed(categories);
                std::vector<std::vector<double>> times(grid.methods.size());
                std::vector<std::size_t> failures(grid.methods.size(), 0);
                for (std::size_t rep = 0; rep < grid.repetitions; ++rep)
                {
                    auto rng = derive_stream(grid.seed, stream++);
                    std::vector<Sequence> segments;
                    for (std::size_t c = 0; c < chains; ++c)
                        segments.push_back(simulate_dar1(Dar1Params{p, grid.phi}, length, rng));
                    const SegmentSet set(alphabet, std::move(segments));
                    const BootstrapConfig cfg{grid.boot_replicates, rng(), 1, NullModel::Pooled};
                    for (std::size_t m = 0; m < grid.methods.size(); ++m)
                    {
                        const auto start = std::chrono::steady_clock::now();
                        try
                        {
                            (void)evaluate(set, grid.methods[m], cfg);
                        }
                        catch (const DataError&)
                        {
                            ++failures[m];
                        }
                        catch (const NumericalError&)
                        {
                            ++failures[m];
                        }
                        times[m].push_back(std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count());
                    }
                }
                for (std::size_t m = 0; m < grid.methods.size(); ++m)
                {
                    auto& ts = times[m];
                    std::sort(ts.begin(), ts.end());
                    const std::size_t k = ts.size();
                    const double median = k % 2 ? ts[k / 2] : 0.5 * (ts[k / 2 - 1] + ts[k / 2]);
                    rows.push_back(BenchRow{grid.methods[m], chains, categories, length, k, failures[m], median,
                                            std::accumulate(ts.begin(), ts.end(), 0.0) / static_cast<double>(k),
                                            ts.front(), ts.back()});
                }
            }
    return rows;
}

} // namespace discretediag
