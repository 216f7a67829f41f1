#pragma once

#include "discretediag/chain_model.hpp"
#include "discretediag/diagnose.hpp"

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>

namespace discretediag
{

enum class ChainFormat
{
    Long,  // chain_id,iteration,value
    Wide,  // one column per chain
};

std::optional<ChainFormat> parse_chain_format(std::string_view name);

struct CsvOptions
{
    ChainFormat format = ChainFormat::Long;
    bool header = true;
};

/// Parses comma-separated chain data. Fields are unquoted ASCII; lines end in
/// "\n" or "\r\n". Values that all parse as integers form an integer
/// alphabet, otherwise labels are text. Errors carry the 1-based line number.
SegmentSet parse_chain_csv(std::istream& in, const CsvOptions& options);
SegmentSet read_chain_csv(const std::filesystem::path& path, const CsvOptions& options);

/// Wide CSV with one column per segment, values written as their labels.
void write_chains_wide(const SegmentSet& set, std::ostream& out);

enum class ReportFormat
{
    Csv,
    JsonLines,
};

std::optional<ReportFormat> parse_report_format(std::string_view name);

void write_report(const DiagnosticReport& report, std::ostream& out, ReportFormat format);
DiagnosticReport read_report(std::istream& in, ReportFormat format);

/// 17 significant digits; parsing the text recovers the exact double.
std::string format_double(double value);

} // namespace discretediag
