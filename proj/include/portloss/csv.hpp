#ifndef PORTLOSS_CSV_HPP
#define PORTLOSS_CSV_HPP

#include <charconv>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

namespace portloss {

/// Locale-independent decimal formatting (always '.', no grouping).
inline std::string format_double(double v, int precision = -1) {
    char buf[64];
    const auto res = precision < 0
                         ? std::to_chars(buf, buf + sizeof(buf), v)
                         : std::to_chars(buf, buf + sizeof(buf), v, std::chars_format::fixed,
                                         precision);
    return std::string(buf, res.ptr);
}

/// Minimal RFC-4180 writer: comma separator, CRLF-free rows, quoting only
/// when a field needs it (never the case for numeric output).
class CsvWriter {
public:
    explicit CsvWriter(std::ostream& os) : os_(os) {}

    void row(const std::vector<std::string>& fields) {
        for (std::size_t i = 0; i < fields.size(); ++i) {
            if (i) os_ << ',';
            write_field(fields[i]);
        }
        os_ << '\n';
    }

private:
    void write_field(std::string_view f) {
        if (f.find_first_of(",\"\n") == std::string_view::npos) {
            os_ << f;
            return;
        }
        os_ << '"';
        for (char c : f) {
            if (c == '"') os_ << '"';
            os_ << c;
        }
        os_ << '"';
    }

    std::ostream& os_;
};

} // namespace portloss

#endif
