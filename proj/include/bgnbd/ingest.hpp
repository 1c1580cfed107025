#ifndef BGNBD_INGEST_HPP
#define BGNBD_INGEST_HPP

#include <cstdint>
#include <iosfwd>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "bgnbd/model.hpp"

namespace bgnbd {

// Calendar date at day precision, no timezone.
struct Date {
    std::int32_t year;
    std::uint32_t month; // 1..12
    std::uint32_t day;   // 1..31

    // days since 1970-01-01 (proleptic Gregorian)
    std::int64_t to_days() const;
    static Date from_days(std::int64_t days);

    // strict "YYYY-MM-DD"; throws std::invalid_argument on anything else
    static Date parse(const std::string& text);
    std::string to_string() const;

    friend auto operator<=>(const Date&, const Date&) = default;
};

class ParseError : public std::runtime_error {
public:
    ParseError(std::size_t line, const std::string& message);
    std::size_t line() const { return line_; }

private:
    std::size_t line_;
};

struct TransactionRecord {
    std::string customer_id; // non-empty after trimming
    Date purchase_date;
};

struct CustomerHistory {
    std::string customer_id;
    std::vector<Date> purchase_days; // strictly increasing, deduplicated
};

// Groups transactions by customer, collapses same-day duplicates, sorts
// days ascending. Output is sorted by customer_id.
std::vector<CustomerHistory> aggregate_daily(std::span<const TransactionRecord> records);

// (x, t_x, T) with the first purchase day as the customer's time origin:
// x = distinct purchase days - 1, t_x = last - first, T = as_of - first.
// Throws std::out_of_range if as_of precedes the last purchase day.
CustomerSummary summarize(const CustomerHistory& history, Date as_of);

// CSV I/O. Transaction files carry the header
// "customer_id,purchase_date"; summary files "customer_id,x,t_x,T".
// LF and CRLF are both accepted; parse failures throw ParseError with
// the 1-based line number.
std::vector<TransactionRecord> read_transactions(std::istream& in);
std::vector<TransactionRecord> read_transactions_file(const std::string& path);

struct NamedSummary {
    std::string customer_id;
    CustomerSummary summary;
};

void write_summaries(std::ostream& out, std::span<const NamedSummary> summaries);
std::vector<NamedSummary> read_summaries(std::istream& in);
std::vector<NamedSummary> read_summaries_file(const std::string& path);

} // namespace bgnbd

#endif
