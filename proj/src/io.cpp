#include "discretediag/io.hpp"

#include "discretediag/error.hpp"

#include <json.hpp>

#include <algorithm>
#include <charconv>
#include <fstream>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>

namespace discretediag
{

namespace
{

struct Line
{
    std::size_t number;
    std::string text;
};

std::vector<Line> read_lines(std::istream& in)
{
    std::vector<Line> lines;
    std::string text;
    std::size_t number = 0;
    while (std::getline(in, text))
    {
        ++number;
        if (!text.empty() && text.back() == '\r')
            text.pop_back();
        lines.push_back({number, std::move(text)});
    }
    while (!lines.empty() && lines.back().text.empty())
        lines.pop_back();
    return lines;
}

std::vector<std::string> split(const std::string& text, char sep = ',')
{
    std::vector<std::string> fields;
    std::size_t start = 0;
    while (true)
    {
        const auto pos = text.find(sep, start);
        fields.push_back(text.substr(start, pos == std::string::npos ? std::string::npos : pos - start));
        if (pos == std::string::npos)
            return fields;
        start = pos + 1;
    }
}

template <class T>
std::optional<T> parse_number(std::string_view text)
{
    T value{};
    const auto* end = text.data() + text.size();
    const auto [ptr, ec] = std::from_chars(text.data(), end, value);
    if (ec != std::errc() || ptr != end || text.empty())
        return std::nullopt;
    return value;
}

DataError line_error(std::size_t line, const std::string& what)
{
    return DataError("line " + std::to_string(line) + ": " + what);
}

// Integer alphabet when every value is an integer, text otherwise.
SegmentSet encode_fields(const std::vector<std::vector<std::string>>& raw, std::vector<std::string> names)
{
    bool numeric = true;
    for (const auto& seq : raw)
        for (const auto& v : seq)
            numeric = numeric && parse_number<std::int64_t>(v).has_value();

    std::vector<std::vector<Label>> labels;
    labels.reserve(raw.size());
    for (const auto& seq : raw)
    {
        std::vector<Label> out;
        out.reserve(seq.size());
        for (const auto& v : seq)
        {
            if (numeric)
                out.emplace_back(*parse_number<std::int64_t>(v));
            else
                out.emplace_back(v);
        }
        labels.push_back(std::move(out));
    }
    return encode(labels, std::move(names));
}

SegmentSet parse_long(const std::vector<Line>& lines, std::size_t first)
{
    std::vector<std::string> order;
    std::map<std::string, std::vector<std::pair<std::int64_t, std::string>>> rows;
    for (std::size_t l = first; l < lines.size(); ++l)
    {
        const auto fields = split(lines[l].text);
        if (fields.size() != 3)
            throw line_error(lines[l].number, "expected 3 fields (chain,iteration,value), got "
                                                  + std::to_string(fields.size()));
        if (fields[0].empty() || fields[2].empty())
            throw line_error(lines[l].number, "empty field");
        const auto iteration = parse_number<std::int64_t>(fields[1]);
        if (!iteration || *iteration < 1)
            throw line_error(lines[l].number, "iteration must be a positive integer");
        auto [it, inserted] = rows.try_emplace(fields[0]);
        if (inserted)
            order.push_back(fields[0]);
        it->second.emplace_back(*iteration, fields[2]);
    }
    if (order.empty())
        throw DataError("empty file");

    std::vector<std::vector<std::string>> raw;
    for (const auto& chain : order)
    {
        auto& entries = rows[chain];
        std::stable_sort(entries.begin(), entries.end(),
                         [](const auto& a, const auto& b) { return a.first < b.first; });
        std::vector<std::string> values;
        for (std::size_t k = 0; k < entries.size(); ++k)
        {
            if (k > 0 && entries[k].first == entries[k - 1].first)
                throw DataError("duplicate (chain, iteration) = (" + chain + ", "
                                + std::to_string(entries[k].first) + ")");
            if (entries[k].first != static_cast<std::int64_t>(k + 1))
                throw DataError("chain " + chain + ": iterations are not contiguous from 1");
            values.push_back(std::move(entries[k].second));
        }
        raw.push_back(std::move(values));
    }
    return encode_fields(raw, order);
}

SegmentSet parse_wide(const std::vector<Line>& lines, bool header)
{
    const auto columns = split(lines.front().text).size();
    std::vector<std::string> names;
    std::size_t first = 0;
    if (header)
    {
        names = split(lines.front().text);
        for (const auto& n : names)
            if (n.empty())
                throw line_error(lines.front().number, "empty column name");
        first = 1;
    }
    else
    {
        for (std::size_t c = 1; c <= columns; ++c)
            names.push_back(std::to_string(c));
    }
    std::vector<std::vector<std::string>> raw(columns);
    for (std::size_t l = first; l < lines.size(); ++l)
    {
        const auto fields = split(lines[l].text);
        if (fields.size() != columns)
            throw line_error(lines[l].number, "expected " + std::to_string(columns) + " fields, got "
                                                  + std::to_string(fields.size()));
        for (std::size_t c = 0; c < columns; ++c)
        {
            if (fields[c].empty())
                throw line_error(lines[l].number, "empty field (wide format needs equal-length columns)");
            raw[c].push_back(fields[c]);
        }
    }
    if (lines.size() == first)
        throw DataError("empty file");
    return encode_fields(raw, std::move(names));
}

} // namespace

std::optional<ChainFormat> parse_chain_format(std::string_view name)
{
    if (name == "long")
        return ChainFormat::Long;
    if (name == "wide")
        return ChainFormat::Wide;
    return std::nullopt;
}

SegmentSet parse_chain_csv(std::istream& in, const CsvOptions& options)
{
    const auto lines = read_lines(in);
    if (lines.empty())
        throw DataError("empty file");
    for (const auto& line : lines)
        if (line.text.empty())
            throw line_error(line.number, "empty row");
    if (options.format == ChainFormat::Long)
        return parse_long(lines, options.header ? 1 : 0);
    return parse_wide(lines, options.header);
}

SegmentSet read_chain_csv(const std::filesystem::path& path, const CsvOptions& options)
{
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw DataError("cannot open " + path.string());
    return parse_chain_csv(in, options);
}

void write_chains_wide(const SegmentSet& set, std::ostream& out)
{
    for (std::size_t i = 0; i < set.count(); ++i)
        out << (i ? "," : "") << set.name(i);
    out << '\n';
    std::size_t rows = 0;
    for (const auto& seq : set.segments())
        rows = std::max(rows, seq.size());
    for (std::size_t t = 0; t < rows; ++t)
    {
        for (std::size_t i = 0; i < set.count(); ++i)
        {
            if (i)
                out << ',';
            if (t < set.length(i))
                out << to_string(set.alphabet().label(set.segment(i)[t]));
        }
        out << '\n';
    }
}

std::optional<ReportFormat> parse_report_format(std::string_view name)
{
    if (name == "csv")
        return ReportFormat::Csv;
    if (name == "jsonl" || name == "json-lines")
        return ReportFormat::JsonLines;
    return std::nullopt;
}

std::string format_double(double value)
{
    char buf[64];
    const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, value, std::chars_format::general, 17);
    return std::string(buf, ptr);
}

namespace
{

constexpr std::string_view kCsvMagic = "# discretediag report v1";
constexpr std::string_view kCsvHeader = "method,mode,unit,checkpoint,statistic,df,p,warnings,replicates,reject";

template <class T>
std::string optional_field(const std::optional<T>& v)
{
    return v ? std::to_string(*v) : std::string();
}

std::string join_warnings(const std::vector<Warning>& warnings)
{
    std::string out;
    for (std::size_t k = 0; k < warnings.size(); ++k)
        out += (k ? ";" : "") + std::string(to_string(warnings[k]));
    return out;
}

std::vector<Warning> split_warnings(const std::string& text)
{
    std::vector<Warning> out;
    if (text.empty())
        return out;
    for (const auto& name : split(text, ';'))
    {
        const auto w = parse_warning(name);
        if (!w)
            throw DataError("unknown warning '" + name + "'");
        out.push_back(*w);
    }
    return out;
}

void write_csv(const DiagnosticReport& report, std::ostream& out)
{
    out << kCsvMagic << '\n';
    out << "# method=" << to_string(report.method) << '\n';
    out << "# mode=" << to_string(report.mode) << '\n';
    out << "# sequential=" << (report.sequential ? "true" : "false") << '\n';
    out << "# alpha=" << format_double(report.alpha) << '\n';
    out << "# window_fraction=" << format_double(report.window_fraction) << '\n';
    out << "# boot_replicates=" << report.bootstrap.replicates << '\n';
    out << "# seed=" << report.bootstrap.seed << '\n';
    out << "# null=" << to_string(report.bootstrap.null_model) << '\n';
    for (const auto& w : report.warnings)
        out << "# warning=" << w << '\n';
    out << kCsvHeader << '\n';
    for (const auto& e : report.evaluations)
    {
        const auto& o = e.outcome;
        out << to_string(o.method) << ',' << to_string(report.mode) << ',' << e.unit << ','
            << optional_field(e.checkpoint) << ',' << format_double(o.statistic) << ',' << optional_field(o.df) << ','
            << format_double(o.p_value) << ',' << join_warnings(o.warnings) << ',' << optional_field(o.replicates)
            << ',' << (e.reject ? 1 : 0) << '\n';
    }
}

std::string json_string(const std::string& s)
{
    return nlohmann::json(s).dump();
}

template <class T>
std::string json_optional(const std::optional<T>& v)
{
    return v ? std::to_string(*v) : std::string("null");
}

void write_jsonl(const DiagnosticReport& report, std::ostream& out)
{
    out << "{\"record\":\"run\",\"method\":" << json_string(std::string(to_string(report.method)))
        << ",\"mode\":" << json_string(std::string(to_string(report.mode)))
        << ",\"sequential\":" << (report.sequential ? "true" : "false") << ",\"alpha\":" << format_double(report.alpha)
        << ",\"window_fraction\":" << format_double(report.window_fraction)
        << ",\"boot_replicates\":" << report.bootstrap.replicates << ",\"seed\":" << report.bootstrap.seed
        << ",\"null\":" << json_string(std::string(to_string(report.bootstrap.null_model))) << ",\"warnings\":[";
    for (std::size_t k = 0; k < report.warnings.size(); ++k)
        out << (k ? "," : "") << json_string(report.warnings[k]);
    out << "]}\n";
    for (const auto& e : report.evaluations)
    {
        const auto& o = e.outcome;
        out << "{\"record\":\"outcome\",\"method\":" << json_string(std::string(to_string(o.method)))
            << ",\"mode\":" << json_string(std::string(to_string(report.mode))) << ",\"unit\":" << json_string(e.unit)
            << ",\"checkpoint\":" << json_optional(e.checkpoint) << ",\"statistic\":" << format_double(o.statistic)
            << ",\"df\":" << json_optional(o.df) << ",\"p\":" << format_double(o.p_value) << ",\"warnings\":[";
        for (std::size_t k = 0; k < o.warnings.size(); ++k)
            out << (k ? "," : "") << json_string(std::string(to_string(o.warnings[k])));
        out << "],\"replicates\":" << json_optional(o.replicates) << ",\"reject\":" << (e.reject ? "true" : "false")
            << "}\n";
    }
}

template <class T>
T require(const std::optional<T>& v, const std::string& what)
{
    if (!v)
        throw DataError("report: invalid " + what);
    return *v;
}

template <class T>
std::optional<T> parse_optional(const std::string& text, const std::string& what)
{
    if (text.empty())
        return std::nullopt;
    return require(parse_number<T>(text), what);
}

DiagnosticReport read_csv(std::istream& in)
{
    const auto lines = read_lines(in);
    if (lines.empty() || lines.front().text != kCsvMagic)
        throw DataError("report: missing header line");
    DiagnosticReport report;
    std::size_t l = 1;
    for (; l < lines.size() && lines[l].text.rfind("# ", 0) == 0; ++l)
    {
        const auto& text = lines[l].text;
        const auto eq = text.find('=');
        if (eq == std::string::npos)
            throw line_error(lines[l].number, "malformed metadata");
        const auto key = text.substr(2, eq - 2);
        const auto value = text.substr(eq + 1);
        if (key == "method")
            report.method = require(parse_method(value), "method");
        else if (key == "mode")
            report.mode = require(parse_mode(value), "mode");
        else if (key == "sequential")
            report.sequential = value == "true";
        else if (key == "alpha")
            report.alpha = require(parse_number<double>(value), "alpha");
        else if (key == "window_fraction")
            report.window_fraction = require(parse_number<double>(value), "window_fraction");
        else if (key == "boot_replicates")
            report.bootstrap.replicates = require(parse_number<std::size_t>(value), "boot_replicates");
        else if (key == "seed")
            report.bootstrap.seed = require(parse_number<std::uint64_t>(value), "seed");
        else if (key == "null")
            report.bootstrap.null_model = require(parse_null_model(value), "null");
        else if (key == "warning")
            report.warnings.push_back(value);
        else
            throw line_error(lines[l].number, "unknown metadata key '" + key + "'");
    }
    if (l >= lines.size() || lines[l].text != kCsvHeader)
        throw DataError("report: missing column header");
    for (++l; l < lines.size(); ++l)
    {
        const auto f = split(lines[l].text);
        if (f.size() != 10)
            throw line_error(lines[l].number, "expected 10 fields");
        Evaluation e;
        e.outcome.method = require(parse_method(f[0]), "method");
        e.unit = f[2];
        e.checkpoint = parse_optional<std::size_t>(f[3], "checkpoint");
        e.outcome.statistic = require(parse_number<double>(f[4]), "statistic");
        e.outcome.df = parse_optional<std::int64_t>(f[5], "df");
        e.outcome.p_value = require(parse_number<double>(f[6]), "p");
        e.outcome.warnings = split_warnings(f[7]);
        e.outcome.replicates = parse_optional<std::int64_t>(f[8], "replicates");
        e.reject = f[9] == "1";
        report.evaluations.push_back(std::move(e));
    }
    return report;
}

template <class T>
std::optional<T> json_optional_value(const nlohmann::json& j)
{
    if (j.is_null())
        return std::nullopt;
    return j.get<T>();
}

DiagnosticReport read_jsonl(std::istream& in)
{
    const auto lines = read_lines(in);
    if (lines.empty())
        throw DataError("report: empty");
    DiagnosticReport report;
    try
    {
        const auto run = nlohmann::json::parse(lines.front().text);
        if (run.at("record") != "run")
            throw DataError("report: first record must be the run record");
        report.method = require(parse_method(run.at("method").get<std::string>()), "method");
        report.mode = require(parse_mode(run.at("mode").get<std::string>()), "mode");
        report.sequential = run.at("sequential").get<bool>();
        report.alpha = run.at("alpha").get<double>();
        report.window_fraction = run.at("window_fraction").get<double>();
        report.bootstrap.replicates = run.at("boot_replicates").get<std::size_t>();
        report.bootstrap.seed = run.at("seed").get<std::uint64_t>();
        report.bootstrap.null_model = require(parse_null_model(run.at("null").get<std::string>()), "null");
        report.warnings = run.at("warnings").get<std::vector<std::string>>();
        for (std::size_t l = 1; l < lines.size(); ++l)
        {
            const auto j = nlohmann::json::parse(lines[l].text);
            Evaluation e;
            e.outcome.method = require(parse_method(j.at("method").get<std::string>()), "method");
            e.unit = j.at("unit").get<std::string>();
            e.checkpoint = json_optional_value<std::size_t>(j.at("checkpoint"));
            e.outcome.statistic = j.at("statistic").get<double>();
            e.outcome.df = json_optional_value<std::int64_t>(j.at("df"));
            e.outcome.p_value = j.at("p").get<double>();
            for (const auto& w : j.at("warnings"))
                e.outcome.warnings.push_back(require(parse_warning(w.get<std::string>()), "warning"));
            e.outcome.replicates = json_optional_value<std::int64_t>(j.at("replicates"));
            e.reject = j.at("reject").get<bool>();
            report.evaluations.push_back(std::move(e));
        }
    }
    catch (const nlohmann::json::exception& e)
    {
        throw DataError(std::string("report: ") + e.what());
    }
    return report;
}

} // namespace

void write_report(const DiagnosticReport& report, std::ostream& out, ReportFormat format)
{
    if (format == ReportFormat::Csv)
        write_csv(report, out);
    else
        write_jsonl(report, out);
    if (!out)
        throw DataError("failed to write report");
}

DiagnosticReport read_report(std::istream& in, ReportFormat format)
{
    return format == ReportFormat::Csv ? read_csv(in) : read_jsonl(in);
}

} // namespace discretediag
