#include "bgnbd/ingest.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cstdio>
#include <fstream>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>

namespace bgnbd {

namespace {

bool leap_year(std::int32_t y)
{
    return y % 4 == 0 && (y % 100 != 0 || y % 400 == 0);
}

std::uint32_t days_in_month(std::int32_t y, std::uint32_t m)
{
    static constexpr std::uint32_t lengths[12] = {31, 28, 31, 30, 31, 30,
                                                  31, 31, 30, 31, 30, 31};
    if (m == 2 && leap_year(y)) return 29;
    return lengths[m - 1];
}

std::string trim(const std::string& s)
{
    std::size_t begin = 0;
    std::size_t end = s.size();
    while (begin < end && std::isspace(static_cast<unsigned char>(s[begin]))) ++begin;
    while (end > begin && std::isspace(static_cast<unsigned char>(s[end - 1]))) --end;
    return s.substr(begin, end - begin);
}

// strips a trailing CR (CRLF input) and a leading UTF-8 BOM on line 1
std::string clean_line(std::string line, bool first)
{
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (first && line.size() >= 3 && line[0] == '\xEF' && line[1] == '\xBB' &&
        line[2] == '\xBF') {
        line.erase(0, 3);
    }
    return line;
}

std::int64_t parse_int_field(const std::string& field, std::size_t line,
                             const char* what)
{
    std::int64_t value = 0;
    const char* first = field.data();
    const char* last = field.data() + field.size();
    auto [ptr, ec] = std::from_chars(first, last, value);
    if (ec != std::errc{} || ptr != last) {
        throw ParseError(line, std::string("invalid ") + what + " '" + field + "'");
    }
    return value;
}

std::vector<std::string> split_fields(const std::string& line)
{
    std::vector<std::string> fields;
    std::size_t start = 0;
    while (true) {
        const std::size_t comma = line.find(',', start);
        if (comma == std::string::npos) {
            fields.push_back(line.substr(start));
            return fields;
        }
        fields.push_back(line.substr(start, comma - start));
        start = comma + 1;
    }
}

} // namespace

// Howard Hinnant's civil-date algorithms.
std::int64_t Date::to_days() const
{
    const std::int64_t y = year - (month <= 2 ? 1 : 0);
    const std::int64_t era = (y >= 0 ? y : y - 399) / 400;
    const std::uint64_t yoe = static_cast<std::uint64_t>(y - era * 400);
    const std::uint64_t doy = (153 * (month + (month > 2 ? -3 : 9)) + 2) / 5 + day - 1;
    const std::uint64_t doe = yoe * 365 + yoe / 4 - yoe / 100 + doy;
    return era * 146097 + static_cast<std::int64_t>(doe) - 719468;
}

Date Date::from_days(std::int64_t days)
{
    const std::int64_t z = days + 719468;
    const std::int64_t era = (z >= 0 ? z : z - 146096) / 146097;
    const std::uint64_t doe = static_cast<std::uint64_t>(z - era * 146097);
    const std::uint64_t yoe = (doe - doe / 1460 + doe / 36524 - doe / 146096) / 365;
    const std::int64_t y = static_cast<std::int64_t>(yoe) + era * 400;
    const std::uint64_t doy = doe - (365 * yoe + yoe / 4 - yoe / 100);
    const std::uint64_t mp = (5 * doy + 2) / 153;
    const std::uint32_t d = static_cast<std::uint32_t>(doy - (153 * mp + 2) / 5 + 1);
    const std::uint32_t m = static_cast<std::uint32_t>(mp + (mp < 10 ? 3 : -9));
    return Date{static_cast<std::int32_t>(y + (m <= 2 ? 1 : 0)), m, d};
}

Date Date::parse(const std::string& text)
{
    if (text.size() != 10 || text[4] != '-' || text[7] != '-') {
        throw std::invalid_argument("date must be YYYY-MM-DD: '" + text + "'");
    }
    auto digits = [&](std::size_t pos, std::size_t len) {
        std::int32_t v = 0;
        for (std::size_t i = pos; i < pos + len; ++i) {
            if (!std::isdigit(static_cast<unsigned char>(text[i]))) {
                throw std::invalid_argument("date must be YYYY-MM-DD: '" + text + "'");
            }
            v = v * 10 + (text[i] - '0');
        }
        return v;
    };
    const std::int32_t y = digits(0, 4);
    const std::uint32_t m = static_cast<std::uint32_t>(digits(5, 2));
    const std::uint32_t d = static_cast<std::uint32_t>(digits(8, 2));
    if (m < 1 || m > 12 || d < 1 || d > days_in_month(y, m)) {
        throw std::invalid_argument("no such calendar day: '" + text + "'");
    }
    return Date{y, m, d};
}

std::string Date::to_string() const
{
    char buffer[16];
    std::snprintf(buffer, sizeof buffer, "%04d-%02u-%02u", year, month, day);
    return buffer;
}

ParseError::ParseError(std::size_t line, const std::string& message)
    : std::runtime_error("line " + std::to_string(line) + ": " + message), line_(line)
{
}

std::vector<CustomerHistory> aggregate_daily(std::span<const TransactionRecord> records)
{
    std::map<std::string, std::vector<Date>> grouped;
    for (const TransactionRecord& record : records) {
        grouped[record.customer_id].push_back(record.purchase_date);
    }
    std::vector<CustomerHistory> histories;
    histories.reserve(grouped.size());
    for (auto& [id, days] : grouped) {
        std::sort(days.begin(), days.end());
        days.erase(std::unique(days.begin(), days.end()), days.end());
        histories.push_back(CustomerHistory{id, std::move(days)});
    }
    return histories;
}

CustomerSummary summarize(const CustomerHistory& history, Date as_of)
{
    if (history.purchase_days.empty()) {
        throw std::invalid_argument("summarize: empty purchase history for customer '" +
                                    history.customer_id + "'");
    }
    const std::int64_t first = history.purchase_days.front().to_days();
    const std::int64_t last = history.purchase_days.back().to_days();
    const std::int64_t now = as_of.to_days();
    if (now < last) {
        throw std::out_of_range("summarize: as-of date precedes last purchase of customer '" +
                                history.customer_id + "'");
    }
    CustomerSummary summary{
        static_cast<std::int64_t>(history.purchase_days.size()) - 1,
        static_cast<double>(last - first), static_cast<double>(now - first)};
    summary.validate();
    return summary;
}

std::vector<TransactionRecord> read_transactions(std::istream& in)
{
    std::string line;
    std::size_t line_number = 0;
    std::vector<TransactionRecord> records;
    while (std::getline(in, line)) {
        ++line_number;
        line = clean_line(std::move(line), line_number == 1);
        if (line_number == 1) {
            if (line != "customer_id,purchase_date") {
                throw ParseError(1, "expected header 'customer_id,purchase_date'");
            }
            continue;
        }
        if (line.empty()) continue;
        const std::vector<std::string> fields = split_fields(line);
        if (fields.size() != 2) {
            throw ParseError(line_number, "expected 2 fields, got " +
                                              std::to_string(fields.size()));
        }
        const std::string id = trim(fields[0]);
        if (id.empty()) {
            throw ParseError(line_number, "empty customer_id");
        }
        try {
            records.push_back(TransactionRecord{id, Date::parse(trim(fields[1]))});
        } catch (const std::invalid_argument& e) {
            throw ParseError(line_number, e.what());
        }
    }
    return records; // a zero-byte file is an empty log
}

std::vector<TransactionRecord> read_transactions_file(const std::string& path)
{
    std::ifstream in(path);
    if (!in) {
        throw std::runtime_error("cannot open transaction file '" + path + "'");
    }
    return read_transactions(in);
}

void write_summaries(std::ostream& out, std::span<const NamedSummary> summaries)
{
    out << "customer_id,x,t_x,T\n";
    for (const NamedSummary& row : summaries) {
        out << row.customer_id << ',' << row.summary.x << ','
            << static_cast<std::int64_t>(row.summary.t_x) << ','
            << static_cast<std::int64_t>(row.summary.T) << '\n';
    }
}

std::vector<NamedSummary> read_summaries(std::istream& in)
{
    std::string line;
    std::size_t line_number = 0;
    std::vector<NamedSummary> rows;
    while (std::getline(in, line)) {
        ++line_number;
        line = clean_line(std::move(line), line_number == 1);
        if (line_number == 1) {
            if (line != "customer_id,x,t_x,T") {
                throw ParseError(1, "expected header 'customer_id,x,t_x,T'");
            }
            continue;
        }
        if (line.empty()) continue;
        const std::vector<std::string> fields = split_fields(line);
        if (fields.size() != 4) {
            throw ParseError(line_number, "expected 4 fields, got " +
                                              std::to_string(fields.size()));
        }
        const std::string id = trim(fields[0]);
        if (id.empty()) {
            throw ParseError(line_number, "empty customer_id");
        }
        CustomerSummary summary{
            parse_int_field(trim(fields[1]), line_number, "x"),
            static_cast<double>(parse_int_field(trim(fields[2]), line_number, "t_x")),
            static_cast<double>(parse_int_field(trim(fields[3]), line_number, "T"))};
        try {
            summary.validate();
        } catch (const std::invalid_argument& e) {
            throw ParseError(line_number, e.what());
        }
        rows.push_back(NamedSummary{id, summary});
    }
    return rows;
}

std::vector<NamedSummary> read_summaries_file(const std::string& path)
{
    std::ifstream in(path);
    if (!in) {
        throw std::runtime_error("cannot open summary file '" + path + "'");
    }
    return read_summaries(in);
}

} // namespace bgnbd
