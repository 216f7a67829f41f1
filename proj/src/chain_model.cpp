#include "discretediag/chain_model.hpp"

#include "discretediag/error.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>

namespace discretediag
{

std::string to_string(const Label& label)
{
    if (const auto* i = std::get_if<std::int64_t>(&label))
        return std::to_string(*i);
    return std::get<std::string>(label);
}

CategoryAlphabet::CategoryAlphabet(std::vector<Label> labels) : labels_(std::move(labels))
{
    if (labels_.empty())
        throw DataError("alphabet must contain at least one category");
    std::set<Label> seen(labels_.begin(), labels_.end());
    if (seen.size() != labels_.size())
        throw DataError("alphabet labels must be distinct");
}

CategoryAlphabet CategoryAlphabet::indexed(std::size_t size)
{
    std::vector<Label> labels;
    labels.reserve(size);
    for (std::size_t j = 1; j <= size; ++j)
        labels.emplace_back(static_cast<std::int64_t>(j));
    return CategoryAlphabet(std::move(labels));
}

std::optional<Category> CategoryAlphabet::index_of(const Label& label) const
{
    auto it = std::find(labels_.begin(), labels_.end(), label);
    if (it == labels_.end())
        return std::nullopt;
    return static_cast<Category>(it - labels_.begin());
}

SegmentSet::SegmentSet(CategoryAlphabet alphabet, std::vector<Sequence> segments,
                       std::vector<std::string> names)
    : alphabet_(std::move(alphabet)), segments_(std::move(segments)), names_(std::move(names))
{
    if (segments_.empty())
        throw DataError("no segments");
    const auto r = static_cast<Category>(alphabet_.size());
    for (std::size_t i = 0; i < segments_.size(); ++i)
    {
        if (segments_[i].size() < 2)
            throw DataError("segment " + std::to_string(i) + " too short");
        for (Category x : segments_[i])
            if (x < 0 || x >= r)
                throw DataError("segment " + std::to_string(i) + " has a value outside the alphabet");
    }
    if (names_.empty())
    {
        for (std::size_t i = 0; i < segments_.size(); ++i)
            names_.push_back(std::to_string(i + 1));
    }
    else if (names_.size() != segments_.size())
    {
        throw DataError("segment names do not match segment count");
    }
}

std::size_t SegmentSet::total_length() const noexcept
{
    std::size_t n = 0;
    for (const auto& s : segments_)
        n += s.size();
    return n;
}

std::size_t SegmentSet::min_length() const noexcept
{
    std::size_t n = segments_.empty() ? 0 : segments_.front().size();
    for (const auto& s : segments_)
        n = std::min(n, s.size());
    return n;
}

SegmentSet encode(const std::vector<std::vector<Label>>& raw, std::vector<std::string> names)
{
    if (raw.empty())
        throw DataError("no sequences to encode");
    std::set<Label> observed;
    for (std::size_t i = 0; i < raw.size(); ++i)
    {
        if (raw[i].size() < 2)
            throw DataError("segment " + std::to_string(i) + " too short");
        observed.insert(raw[i].begin(), raw[i].end());
    }
    if (observed.begin()->index() != observed.rbegin()->index())
        throw DataError("labels mix integer and text values");

    CategoryAlphabet alphabet(std::vector<Label>(observed.begin(), observed.end()));
    std::vector<Sequence> segments;
    segments.reserve(raw.size());
    for (const auto& seq : raw)
    {
        Sequence encoded;
        encoded.reserve(seq.size());
        for (const auto& label : seq)
            encoded.push_back(static_cast<Category>(std::distance(observed.begin(), observed.find(label))));
        segments.push_back(std::move(encoded));
    }
    return SegmentSet(std::move(alphabet), std::move(segments), std::move(names));
}

std::vector<std::vector<Label>> decode(const SegmentSet& set)
{
    std::vector<std::vector<Label>> out;
    out.reserve(set.count());
    for (const auto& seq : set.segments())
    {
        std::vector<Label> labels;
        labels.reserve(seq.size());
        for (Category x : seq)
            labels.push_back(set.alphabet().label(x));
        out.push_back(std::move(labels));
    }
    return out;
}

FrequencyTable frequency_table(const SegmentSet& set)
{
    FrequencyTable t;
    t.segments = set.count();
    t.categories = set.categories();
    t.counts.assign(t.segments * t.categories, 0);
    t.segment_totals.assign(t.segments, 0);
    t.pooled_counts.assign(t.categories, 0);

    for (std::size_t i = 0; i < t.segments; ++i)
    {
        auto* row = t.counts.data() + i * t.categories;
        for (Category x : set.segment(i))
            ++row[x];
        t.segment_totals[i] = static_cast<std::int64_t>(set.length(i));
        for (std::size_t j = 0; j < t.categories; ++j)
            t.pooled_counts[j] += row[j];
    }
    t.total = std::accumulate(t.segment_totals.begin(), t.segment_totals.end(), std::int64_t{0});
    t.pooled_proportions.resize(t.categories);
    for (std::size_t j = 0; j < t.categories; ++j)
    {
        t.pooled_proportions[j] = static_cast<double>(t.pooled_counts[j]) / static_cast<double>(t.total);
        if (t.pooled_counts[j] > 0)
            t.support.push_back(static_cast<Category>(j));
    }
    return t;
}

std::optional<double> TransitionTable::segment_probability(std::size_t i, std::size_t j, std::size_t k) const
{
    const auto total = row_total(i, j);
    if (total == 0)
        return std::nullopt;
    return static_cast<double>(count(i, j, k)) / static_cast<double>(total);
}

double TransitionTable::pooled_probability(std::size_t j, std::size_t k) const
{
    const auto total = pooled_row_totals[j];
    if (total == 0)
        return 0.0;
    return static_cast<double>(pooled_counts[j * categories + k]) / static_cast<double>(total);
}

std::vector<std::size_t> TransitionTable::active_segments(std::size_t j) const
{
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < segments; ++i)
        if (row_total(i, j) > 0)
            out.push_back(i);
    return out;
}

std::vector<Category> TransitionTable::support(std::size_t j) const
{
    std::vector<Category> out;
    for (std::size_t k = 0; k < categories; ++k)
        if (pooled_counts[j * categories + k] > 0)
            out.push_back(static_cast<Category>(k));
    return out;
}

TransitionTable transition_table(const SegmentSet& set)
{
    TransitionTable t;
    t.segments = set.count();
    t.categories = set.categories();
    const std::size_t r = t.categories;
    t.counts.assign(t.segments * r * r, 0);
    t.row_totals.assign(t.segments * r, 0);
    t.pooled_counts.assign(r * r, 0);
    t.pooled_row_totals.assign(r, 0);

    for (std::size_t i = 0; i < t.segments; ++i)
    {
        const auto& seq = set.segment(i);
        auto* block = t.counts.data() + i * r * r;
        for (std::size_t step = 1; step < seq.size(); ++step)
            ++block[static_cast<std::size_t>(seq[step - 1]) * r + static_cast<std::size_t>(seq[step])];
        for (std::size_t j = 0; j < r; ++j)
        {
            for (std::size_t k = 0; k < r; ++k)
            {
                t.row_totals[i * r + j] += block[j * r + k];
                t.pooled_counts[j * r + k] += block[j * r + k];
            }
            t.pooled_row_totals[j] += t.row_totals[i * r + j];
        }
    }
    return t;
}

WindowSplit within_windows(std::size_t length, double fraction)
{
    if (!(fraction > 0.0 && fraction < 0.5))
        throw DataError("window fraction must lie in (0, 0.5)");
    // Guard against products like 0.3 * 10 landing just below an integer.
    const auto window = static_cast<std::size_t>(std::floor(fraction * static_cast<double>(length) * (1.0 + 1e-12)));
    if (window < 2)
        throw DataError("chain of length " + std::to_string(length) + " too short for window fraction "
                        + std::to_string(fraction));
    return WindowSplit{window, length - window};
}

SegmentSet split_within(std::span<const Category> chain, const CategoryAlphabet& alphabet, double fraction)
{
    const auto split = within_windows(chain.size(), fraction);
    std::vector<Sequence> parts{
        Sequence(chain.begin(), chain.begin() + static_cast<std::ptrdiff_t>(split.window)),
        Sequence(chain.begin() + static_cast<std::ptrdiff_t>(split.tail_start), chain.end()),
    };
    return SegmentSet(alphabet, std::move(parts), {"head", "tail"});
}

SegmentSet prefix(const SegmentSet& set, std::size_t length)
{
    std::vector<Sequence> parts;
    parts.reserve(set.count());
    for (const auto& seq : set.segments())
    {
        if (length > seq.size())
            throw DataError("prefix length " + std::to_string(length) + " exceeds chain length "
                            + std::to_string(seq.size()));
        parts.emplace_back(seq.begin(), seq.begin() + static_cast<std::ptrdiff_t>(length));
    }
    return SegmentSet(set.alphabet(), std::move(parts), set.names());
}

} // namespace discretediag
