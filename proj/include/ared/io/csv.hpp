#pragma once

#include "ared/benchmarks.hpp"
#include "ared/domain.hpp"

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace ared::csv {

using Row = std::vector<std::string>;

/// Shortest decimal text that parses back to the same double.
std::string format_double(double v);
/// Throws CorruptDocument on anything but a complete finite number.
double parse_double(std::string_view text);

/// Quotes a field when it contains a comma, quote, CR or LF.
std::string escape_field(std::string_view field);
/// RFC 4180 text with CRLF line endings.
std::string write(const std::vector<Row>& rows);
/// Accepts CRLF or LF, quoted fields with embedded separators and doubled quotes.
std::vector<Row> parse(std::string_view text);

/// Columns trial,case_count,source,mae,mape,r; an absent MAPE is an empty field.
std::string comparison_csv(const bench::ComparisonTable& table);
bench::ComparisonTable parse_comparison_csv(std::string_view text);

/// One row per sample: index, provenance, one column per iv, the dv.
/// Unmeasured values are empty.
std::string archive_csv(const Domain& domain, const std::vector<Sample>& archive);
std::vector<Sample> parse_archive_csv(const Domain& domain, std::string_view text);

/// Throws IoFailure.
void export_csv(const bench::ComparisonTable& table, const std::filesystem::path& path);
void export_csv(const Domain& domain, const std::vector<Sample>& archive,
                const std::filesystem::path& path);

} // namespace ared::csv
