#pragma once

// Event-log data model, disk formats, and the exact trace-variant query.

#include <algorithm>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <unordered_set>
#include <vector>

namespace sacofa {

using Activity = std::string;

// Reserved wire tokens; never valid as activity labels.
inline constexpr const char* kEndToken = "__END__";
inline constexpr const char* kEndUnknownToken = "__END_UNKNOWN__";

class FormatError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

inline bool valid_activity_label(const std::string& label) {
    if (label.empty()) return false;
    if (label == kEndToken || label == kEndUnknownToken) return false;
    return label.find('\t') == std::string::npos &&
           label.find('\n') == std::string::npos;
}

struct Trace {
    std::string case_id;
    std::vector<Activity> activities;  // length >= 1, recorded order
};

struct EventLog {
    std::vector<Trace> traces;
    std::vector<Activity> activity_universe;  // sorted, unique

    bool empty() const { return traces.empty(); }
};

// A trace variant: an activity sequence plus a termination flag. The end
// symbol is never stored in-sequence.
struct Variant {
    std::vector<Activity> activities;
    bool terminated = true;

    bool operator==(const Variant& other) const = default;
    auto operator<=>(const Variant& other) const = default;
};

// Map from variant to positive occurrence count. Zero-count entries are
// never stored.
class VariantDistribution {
public:
    using Map = std::map<Variant, std::uint64_t>;

    void add(const Variant& v, std::uint64_t count) {
        if (count == 0) return;
        entries_[v] += count;
    }

    std::uint64_t count(const Variant& v) const {
        auto it = entries_.find(v);
        return it == entries_.end() ? 0 : it->second;
    }

    std::uint64_t total() const {
        std::uint64_t sum = 0;
        for (const auto& [v, c] : entries_) sum += c;
        return sum;
    }

    std::size_t size() const { return entries_.size(); }
    bool empty() const { return entries_.empty(); }

    const Map& entries() const { return entries_; }

    bool operator==(const VariantDistribution& other) const = default;

private:
    Map entries_;
};

namespace detail {

// RFC 4180 record reader. Handles quoted fields with embedded commas,
// doubled quotes, and newlines inside quotes.
inline bool read_csv_record(std::istream& in, std::vector<std::string>& fields) {
    fields.clear();
    std::string field;
    bool in_quotes = false;
    bool saw_any = false;
    int ch;
    while ((ch = in.get()) != EOF) {
        saw_any = true;
        char c = static_cast<char>(ch);
        if (in_quotes) {
            if (c == '"') {
                if (in.peek() == '"') {
                    in.get();
                    field.push_back('"');
                } else {
                    in_quotes = false;
                }
            } else {
                field.push_back(c);
            }
        } else if (c == '"') {
            in_quotes = true;
        } else if (c == ',') {
            fields.push_back(std::move(field));
            field.clear();
        } else if (c == '\r') {
            if (in.peek() == '\n') in.get();
            fields.push_back(std::move(field));
            return true;
        } else if (c == '\n') {
            fields.push_back(std::move(field));
            return true;
        } else {
            field.push_back(c);
        }
    }
    if (!saw_any) return false;
    fields.push_back(std::move(field));
    return true;
}

// Order keys are either plain integers or RFC 3339 timestamps. A key is
// normalized to a sortable pair (seconds since epoch, nanoseconds) for
// timestamps, or (value, 0) for integers.
struct OrderKey {
    std::int64_t major = 0;
    std::int64_t minor = 0;
    auto operator<=>(const OrderKey&) const = default;
};

inline std::optional<std::int64_t> parse_int(const std::string& s) {
    if (s.empty()) return std::nullopt;
    std::size_t pos = 0;
    try {
        std::int64_t v = std::stoll(s, &pos);
        if (pos != s.size()) return std::nullopt;
        return v;
    } catch (const std::exception&) {
        return std::nullopt;
    }
}

inline std::int64_t days_from_civil(std::int64_t y, unsigned m, unsigned d) {
    y -= m <= 2;
    const std::int64_t era = (y >= 0 ? y : y - 399) / 400;
    const unsigned yoe = static_cast<unsigned>(y - era * 400);
    const unsigned doy = (153 * (m + (m > 2 ? -3 : 9)) + 2) / 5 + d - 1;
    const unsigned doe = yoe * 365 + yoe / 4 - yoe / 100 + doy;
    return era * 146097 + static_cast<std::int64_t>(doe) - 719468;
}

inline std::optional<OrderKey> parse_rfc3339(const std::string& s) {
    // YYYY-MM-DD[Tt ]hh:mm:ss[.frac][Z|+hh:mm|-hh:mm]
    auto digit = [&](std::size_t i) -> int {
        if (i >= s.size() || s[i] < '0' || s[i] > '9') return -1;
        return s[i] - '0';
    };
    auto num = [&](std::size_t i, int n) -> std::optional<int> {
        int v = 0;
        for (int j = 0; j < n; ++j) {
            int d = digit(i + j);
            if (d < 0) return std::nullopt;
            v = v * 10 + d;
        }
        return v;
    };
    if (s.size() < 19) return std::nullopt;
    auto year = num(0, 4);
    auto mon = num(5, 2);
    auto day = num(8, 2);
    auto hour = num(11, 2);
    auto min = num(14, 2);
    auto sec = num(17, 2);
    if (!year || !mon || !day || !hour || !min || !sec) return std::nullopt;
    if (s[4] != '-' || s[7] != '-' || (s[10] != 'T' && s[10] != 't' && s[10] != ' ') ||
        s[13] != ':' || s[16] != ':')
        return std::nullopt;
    if (*mon < 1 || *mon > 12 || *day < 1 || *day > 31 || *hour > 23 ||
        *min > 59 || *sec > 60)
        return std::nullopt;

    std::size_t i = 19;
    std::int64_t nanos = 0;
    if (i < s.size() && s[i] == '.') {
        ++i;
        std::int64_t scale = 100000000;
        bool any = false;
        while (i < s.size() && digit(i) >= 0) {
            if (scale > 0) nanos += static_cast<std::int64_t>(digit(i)) * scale;
            scale /= 10;
            ++i;
            any = true;
        }
        if (!any) return std::nullopt;
    }
    std::int64_t offset_sec = 0;
    if (i >= s.size()) return std::nullopt;  // timezone required
    if (s[i] == 'Z' || s[i] == 'z') {
        ++i;
    } else if (s[i] == '+' || s[i] == '-') {
        int sign = s[i] == '+' ? 1 : -1;
        auto oh = num(i + 1, 2);
        auto om = num(i + 4, 2);
        if (!oh || !om || i + 3 >= s.size() || s[i + 3] != ':') return std::nullopt;
        offset_sec = sign * (*oh * 3600 + *om * 60);
        i += 6;
    } else {
        return std::nullopt;
    }
    if (i != s.size()) return std::nullopt;

    std::int64_t days = days_from_civil(*year, static_cast<unsigned>(*mon),
                                        static_cast<unsigned>(*day));
    std::int64_t secs =
        days * 86400 + *hour * 3600 + *min * 60 + *sec - offset_sec;
    return OrderKey{secs, nanos};
}

inline OrderKey parse_order_key(const std::string& s, std::size_t line_no) {
    if (auto v = parse_int(s)) return OrderKey{*v, 0};
    if (auto k = parse_rfc3339(s)) return *k;
    throw FormatError("line " + std::to_string(line_no) +
                      ": unparseable order key '" + s + "'");
}

}  // namespace detail

struct CsvColumnMap {
    std::string case_column = "case";
    std::string activity_column = "activity";
    std::string order_column = "order";
};

// Groups rows by case, sorts events by order key (stable, ties broken by
// file row order), and builds the activity universe.
inline EventLog load_csv(const std::filesystem::path& path,
                         const CsvColumnMap& columns = {}) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw FormatError("cannot open " + path.string());

    std::vector<std::string> fields;
    if (!detail::read_csv_record(in, fields))
        throw FormatError(path.string() + ": empty file");

    auto find_column = [&](const std::string& name) -> std::size_t {
        auto it = std::find(fields.begin(), fields.end(), name);
        if (it == fields.end())
            throw FormatError(path.string() + ": missing column '" + name + "'");
        return static_cast<std::size_t>(it - fields.begin());
    };
    const std::size_t case_idx = find_column(columns.case_column);
    const std::size_t act_idx = find_column(columns.activity_column);
    const std::size_t ord_idx = find_column(columns.order_column);

    struct Row {
        detail::OrderKey key;
        std::size_t row_no;
        Activity activity;
    };
    std::map<std::string, std::vector<Row>> cases;
    std::vector<std::string> case_order;  // first-appearance order

    std::size_t line_no = 1;
    while (detail::read_csv_record(in, fields)) {
        ++line_no;
        if (fields.size() == 1 && fields[0].empty()) continue;  // blank line
        std::size_t needed = std::max({case_idx, act_idx, ord_idx}) + 1;
        if (fields.size() < needed)
            throw FormatError("line " + std::to_string(line_no) +
                              ": too few fields");
        const std::string& activity = fields[act_idx];
        if (!valid_activity_label(activity))
            throw FormatError("line " + std::to_string(line_no) +
                              ": invalid activity label '" + activity + "'");
        detail::OrderKey key = detail::parse_order_key(fields[ord_idx], line_no);
        auto [it, inserted] = cases.try_emplace(fields[case_idx]);
        if (inserted) case_order.push_back(fields[case_idx]);
        it->second.push_back(Row{key, line_no, activity});
    }
    if (cases.empty()) throw FormatError(path.string() + ": no event rows");

    EventLog log;
    std::unordered_set<std::string> universe;
    for (const auto& case_id : case_order) {
        auto& rows = cases[case_id];
        std::stable_sort(rows.begin(), rows.end(),
                         [](const Row& a, const Row& b) { return a.key < b.key; });
        Trace t;
        t.case_id = case_id;
        for (auto& r : rows) {
            universe.insert(r.activity);
            t.activities.push_back(std::move(r.activity));
        }
        log.traces.push_back(std::move(t));
    }
    log.activity_universe.assign(universe.begin(), universe.end());
    std::sort(log.activity_universe.begin(), log.activity_universe.end());
    return log;
}

// Variant list format: `<count>\t<comma-joined activities>` per line,
// `#` comment lines ignored. A trailing __END_UNKNOWN__ marks a variant
// whose termination is unknown (emitted for length-capped prefixes).
inline VariantDistribution load_variants(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw FormatError("cannot open " + path.string());

    VariantDistribution dist;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty() || line[0] == '#') continue;
        auto tab = line.find('\t');
        if (tab == std::string::npos)
            throw FormatError("line " + std::to_string(line_no) +
                              ": expected <count>\\t<activities>");
        auto count = detail::parse_int(line.substr(0, tab));
        if (!count || *count < 1)
            throw FormatError("line " + std::to_string(line_no) +
                              ": invalid count '" + line.substr(0, tab) + "'");
        Variant v;
        std::string rest = line.substr(tab + 1);
        std::stringstream ss(rest);
        std::string token;
        while (std::getline(ss, token, ',')) {
            if (token == kEndUnknownToken) {
                v.terminated = false;
                break;
            }
            if (!valid_activity_label(token))
                throw FormatError("line " + std::to_string(line_no) +
                                  ": invalid activity label '" + token + "'");
            v.activities.push_back(token);
        }
        if (v.activities.empty() && v.terminated && rest.empty())
            throw FormatError("line " + std::to_string(line_no) +
                              ": empty variant");
        dist.add(v, static_cast<std::uint64_t>(*count));
    }
    return dist;
}

inline void write_variants(const VariantDistribution& dist,
                           const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw FormatError("cannot open " + path.string() + " for writing");

    std::vector<const VariantDistribution::Map::value_type*> rows;
    for (const auto& e : dist.entries()) rows.push_back(&e);
    std::sort(rows.begin(), rows.end(), [](const auto* a, const auto* b) {
        if (a->second != b->second) return a->second > b->second;
        return a->first < b->first;
    });
    for (const auto* row : rows) {
        out << row->second << '\t';
        bool first = true;
        for (const auto& a : row->first.activities) {
            if (!first) out << ',';
            out << a;
            first = false;
        }
        if (!row->first.terminated) {
            if (!first) out << ',';
            out << kEndUnknownToken;
        }
        out << '\n';
    }
    if (!out) throw FormatError("write failed: " + path.string());
}

// The exact (non-private) trace-variant query tau(L).
inline VariantDistribution variant_query(const EventLog& log) {
    VariantDistribution dist;
    for (const auto& t : log.traces)
        dist.add(Variant{t.activities, true}, 1);
    return dist;
}

// tau(L, v): terminated variants count exact matches; unterminated ones
// count traces having v.activities as a prefix.
inline std::uint64_t prefix_count(const EventLog& log, const Variant& prefix) {
    std::uint64_t n = 0;
    for (const auto& t : log.traces) {
        if (prefix.terminated) {
            if (t.activities == prefix.activities) ++n;
        } else {
            if (t.activities.size() >= prefix.activities.size() &&
                std::equal(prefix.activities.begin(), prefix.activities.end(),
                           t.activities.begin()))
                ++n;
        }
    }
    return n;
}

}  // namespace sacofa
