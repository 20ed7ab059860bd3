#include "ared/io/csv.hpp"

#include "ared/error.hpp"
#include "ared/io/documents.hpp"

#include <charconv>
#include <cmath>

namespace ared::csv {

std::string format_double(double v) {
    char buf[64];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
    if (ec != std::errc{}) throw Error(Errc::IoFailure, "number formatting failed");
    return std::string(buf, ptr);
}

double parse_double(std::string_view text) {
    double v = 0.0;
    const char* first = text.data();
    const char* last = text.data() + text.size();
    if (first != last && *first == '+') ++first;
    auto [ptr, ec] = std::from_chars(first, last, v);
    if (text.empty() || ec != std::errc{} || ptr != last || !std::isfinite(v))
        throw Error(Errc::CorruptDocument, "not a finite number: '" + std::string(text) + "'");
    return v;
}

std::string escape_field(std::string_view field) {
    if (field.find_first_of(",\"\r\n") == std::string_view::npos) return std::string(field);
    std::string out = "\"";
    for (char c : field) {
        if (c == '"') out += '"';
        out += c;
    }
    out += '"';
    return out;
}

std::string write(const std::vector<Row>& rows) {
    std::string out;
    for (const auto& row : rows) {
        for (std::size_t i = 0; i < row.size(); ++i) {
            if (i) out += ',';
            out += escape_field(row[i]);
        }
        out += "\r\n";
    }
    return out;
}

std::vector<Row> parse(std::string_view text) {
    std::vector<Row> rows;
    Row row;
    std::string field;
    bool quoted = false;
    bool any = false; // current row has content
    std::size_t i = 0;
    auto end_row = [&] {
        row.push_back(std::move(field));
        field.clear();
        rows.push_back(std::move(row));
        row.clear();
        any = false;
    };
    while (i < text.size()) {
        char c = text[i];
        if (quoted) {
            if (c == '"') {
                if (i + 1 < text.size() && text[i + 1] == '"') {
                    field += '"';
                    i += 2;
                    continue;
                }
                quoted = false;
            } else {
                field += c;
            }
            ++i;
            continue;
        }
        if (c == '"') {
            if (!field.empty()) throw Error(Errc::CorruptDocument, "quote inside unquoted field");
            quoted = true;
            any = true;
        } else if (c == ',') {
            row.push_back(std::move(field));
            field.clear();
            any = true;
        } else if (c == '\r' || c == '\n') {
            if (c == '\r' && i + 1 < text.size() && text[i + 1] == '\n') ++i;
            end_row();
        } else {
            field += c;
            any = true;
        }
        ++i;
    }
    if (quoted) throw Error(Errc::CorruptDocument, "unterminated quoted field");
    if (any) end_row();
    return rows;
}

std::string comparison_csv(const bench::ComparisonTable& table) {
    std::vector<Row> rows{{"trial", "case_count", "source", "mae", "mape", "r"}};
    for (const auto& r : table.rows) {
        rows.push_back({std::to_string(r.trial), std::to_string(r.case_count), r.source,
                        format_double(r.mae), r.mape ? format_double(*r.mape) : std::string(),
                        format_double(r.r)});
    }
    return write(rows);
}

namespace {

std::size_t parse_size(const std::string& s) {
    std::size_t v = 0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (s.empty() || ec != std::errc{} || ptr != s.data() + s.size())
        throw Error(Errc::CorruptDocument, "not a count: '" + s + "'");
    return v;
}

} // namespace

bench::ComparisonTable parse_comparison_csv(std::string_view text) {
    auto rows = parse(text);
    const Row header{"trial", "case_count", "source", "mae", "mape", "r"};
    if (rows.empty() || rows.front() != header)
        throw Error(Errc::SchemaMismatch, "unexpected comparison table header");
    bench::ComparisonTable table;
    for (std::size_t i = 1; i < rows.size(); ++i) {
        const auto& f = rows[i];
        if (f.size() != header.size())
            throw Error(Errc::CorruptDocument, "row " + std::to_string(i) + " has wrong width");
        bench::ComparisonRow r;
        r.trial = parse_size(f[0]);
        r.case_count = parse_size(f[1]);
        r.source = f[2];
        r.mae = parse_double(f[3]);
        if (!f[4].empty()) r.mape = parse_double(f[4]);
        r.r = parse_double(f[5]);
        table.rows.push_back(std::move(r));
    }
    return table;
}

std::string archive_csv(const Domain& domain, const std::vector<Sample>& archive) {
    Row header{"index", "provenance"};
    for (const auto& iv : domain.ivs) header.push_back(iv.name);
    header.push_back(domain.dv_name);
    std::vector<Row> rows{header};
    for (const auto& s : archive) {
        if (s.coords.size() != domain.dimension())
            throw Error(Errc::LengthMismatch, "sample dimension does not match the domain");
        Row row{std::to_string(s.sequence_index), std::string(to_string(s.provenance))};
        for (double x : s.coords) row.push_back(format_double(x));
        row.push_back(s.value ? format_double(*s.value) : std::string());
        rows.push_back(std::move(row));
    }
    return write(rows);
}

std::vector<Sample> parse_archive_csv(const Domain& domain, std::string_view text) {
    auto rows = parse(text);
    const std::size_t width = domain.dimension() + 3;
    if (rows.empty() || rows.front().size() != width || rows.front()[0] != "index" ||
        rows.front()[1] != "provenance")
        throw Error(Errc::SchemaMismatch, "unexpected archive header");
    std::vector<Sample> out;
    for (std::size_t i = 1; i < rows.size(); ++i) {
        const auto& f = rows[i];
        if (f.size() != width)
            throw Error(Errc::CorruptDocument, "row " + std::to_string(i) + " has wrong width");
        Sample s;
        s.sequence_index = parse_size(f[0]);
        try {
            s.provenance = provenance_from_string(f[1]);
        } catch (const Error&) {
            throw Error(Errc::CorruptDocument, "unknown provenance '" + f[1] + "'");
        }
        for (std::size_t k = 0; k < domain.dimension(); ++k) s.coords.push_back(parse_double(f[2 + k]));
        if (!f.back().empty()) s.value = parse_double(f.back());
        out.push_back(std::move(s));
    }
    return out;
}

void export_csv(const bench::ComparisonTable& table, const std::filesystem::path& path) {
    write_file_atomic(path, comparison_csv(table));
}

void export_csv(const Domain& domain, const std::vector<Sample>& archive,
                const std::filesystem::path& path) {
    write_file_atomic(path, archive_csv(domain, archive));
}

} // namespace ared::csv
