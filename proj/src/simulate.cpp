#include "discretediag/simulate.hpp"

#include "discretediag/error.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace discretediag
{

namespace
{
constexpr double kSumTolerance = 1e-12;
}

void validate_probabilities(std::span<const double> p, const char* what)
{
    if (p.empty())
        throw DataError(std::string(what) + ": empty probability vector");
    double sum = 0.0;
    for (double x : p)
    {
        if (!(x >= 0.0) || !std::isfinite(x))
            throw DataError(std::string(what) + ": probabilities must be finite and nonnegative");
        sum += x;
    }
    if (std::fabs(sum - 1.0) > kSumTolerance)
        throw DataError(std::string(what) + ": probabilities sum to " + std::to_string(sum) + ", not 1");
}

CategoricalSampler::CategoricalSampler(std::span<const double> probabilities)
{
    validate_probabilities(probabilities, "categorical");
    cumulative_.resize(probabilities.size());
    double acc = 0.0;
    for (std::size_t j = 0; j < probabilities.size(); ++j)
    {
        acc += probabilities[j];
        cumulative_[j] = acc;
        if (probabilities[j] > 0.0)
            last_ = static_cast<Category>(j);
    }
}

void Dar1Params::validate() const
{
    validate_probabilities(p, "dar1");
    if (!(phi >= 0.0 && phi < 1.0))
        throw DataError("dar1: phi must lie in [0, 1)");
}

void NdarmaParams::validate() const
{
    validate_probabilities(p, "ndarma");
    if (ma.empty())
        throw DataError("ndarma: at least one innovation weight (varphi_0) is required");
    double sum = 0.0;
    for (double w : ar)
    {
        if (!(w >= 0.0))
            throw DataError("ndarma: weights must be nonnegative");
        sum += w;
    }
    for (double w : ma)
    {
        if (!(w >= 0.0))
            throw DataError("ndarma: weights must be nonnegative");
        sum += w;
    }
    if (std::fabs(sum - 1.0) > kSumTolerance)
        throw DataError("ndarma: selection weights must sum to 1");
    if (!(ma.back() > 0.0))
        throw DataError("ndarma: the last innovation weight must be positive");
    if (!ar.empty() && !(ma.front() > 0.0))
        throw DataError("ndarma: varphi_0 must be positive when the AR order is at least 1");
}

void MarkovParams::validate() const
{
    validate_probabilities(initial, "markov initial");
    if (transition.size() != initial.size())
        throw DataError("markov: transition matrix must be r x r with r = initial size");
    for (const auto& row : transition)
    {
        if (row.size() != initial.size())
            throw DataError("markov: transition matrix must be square");
        validate_probabilities(row, "markov transition row");
    }
}

Sequence simulate_dar1(const Dar1Params& params, std::size_t length, RngStream& rng)
{
    params.validate();
    if (length == 0)
        throw DataError("simulation length must be at least 1");
    const CategoricalSampler draw(params.p);
    Sequence out(length);
    out[0] = draw(rng);
    for (std::size_t t = 1; t < length; ++t)
        out[t] = rng.uniform() < params.phi ? out[t - 1] : draw(rng);
    return out;
}

Sequence simulate_ndarma(const NdarmaParams& params, std::size_t length, RngStream& rng)
{
    params.validate();
    if (length == 0)
        throw DataError("simulation length must be at least 1");
    const CategoricalSampler draw(params.p);
    std::vector<double> weights(params.ar);
    weights.insert(weights.end(), params.ma.begin(), params.ma.end());
    const CategoricalSampler select(weights);

    const std::size_t ar_order = params.ar.size();
    const std::size_t warm = std::max(ar_order, params.ma.size() - 1);
    Sequence out(length);
    Sequence innovations(length);
    for (std::size_t t = 0; t < length; ++t)
    {
        innovations[t] = draw(rng);
        if (t < warm)
        {
            out[t] = innovations[t];
            continue;
        }
        const auto choice = static_cast<std::size_t>(select(rng));
        out[t] = choice < ar_order ? out[t - 1 - choice] : innovations[t - (choice - ar_order)];
    }
    return out;
}

Sequence simulate_markov(const MarkovParams& params, std::size_t length, RngStream& rng)
{
    params.validate();
    if (length == 0)
        throw DataError("simulation length must be at least 1");
    std::vector<CategoricalSampler> rows;
    rows.reserve(params.transition.size());
    for (const auto& row : params.transition)
        rows.emplace_back(row);
    Sequence out(length);
    out[0] = CategoricalSampler(params.initial)(rng);
    for (std::size_t t = 1; t < length; ++t)
        out[t] = rows[static_cast<std::size_t>(out[t - 1])](rng);
    return out;
}

} // namespace discretediag
