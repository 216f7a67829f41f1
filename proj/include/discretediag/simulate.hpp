#pragma once

#include "discretediag/chain_model.hpp"
#include "discretediag/rng.hpp"

#include <cstddef>
#include <span>
#include <vector>

namespace discretediag
{

/// Inverse-CDF sampler over a fixed category order.
class CategoricalSampler
{
public:
    /// `probabilities` must be nonnegative and sum to 1 within 1e-12.
    explicit CategoricalSampler(std::span<const double> probabilities);

    Category operator()(RngStream& rng) const noexcept
    {
        const double u = rng.uniform();
        for (std::size_t j = 0; j + 1 < cumulative_.size(); ++j)
            if (u < cumulative_[j])
                return static_cast<Category>(j);
        return last_;
    }

    std::size_t size() const noexcept { return cumulative_.size(); }

private:
    std::vector<double> cumulative_;
    Category last_ = 0;  // last category with positive mass
};

/// Throws DataError unless the entries are nonnegative and sum to 1 +- 1e-12.
void validate_probabilities(std::span<const double> p, const char* what);

struct Dar1Params
{
    std::vector<double> p;
    double phi = 0.0;

    void validate() const;
};

/// New discrete ARMA(p, q): each value copies one of the previous p values
/// (weights ar) or one of the innovations e_t..e_{t-q} (weights ma).
struct NdarmaParams
{
    std::vector<double> p;
    std::vector<double> ar;  // phi_1..phi_p
    std::vector<double> ma;  // varphi_0..varphi_q, nonempty

    void validate() const;
};

struct MarkovParams
{
    std::vector<std::vector<double>> transition;
    std::vector<double> initial;

    void validate() const;
};

/// X_1 ~ p; afterwards copy the previous value with probability phi,
/// otherwise draw a fresh innovation from p.
Sequence simulate_dar1(const Dar1Params& params, std::size_t length, RngStream& rng);

/// The first max(p, q) values are i.i.d. draws from p and double as the
/// initial innovations.
Sequence simulate_ndarma(const NdarmaParams& params, std::size_t length, RngStream& rng);

Sequence simulate_markov(const MarkovParams& params, std::size_t length, RngStream& rng);

} // namespace discretediag
