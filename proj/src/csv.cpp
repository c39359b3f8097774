#include "scanb/csv.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

namespace scanb {

std::string csv_field(const std::string& value) {
    if (value.find_first_of(",\"\r\n") == std::string::npos) return value;
    std::string out = "\"";
    for (char c : value) {
        if (c == '"') out += '"';
        out += c;
    }
    out += '"';
    return out;
}

std::vector<std::string> parse_csv_line(const std::string& line) {
    std::vector<std::string> fields;
    std::string cur;
    bool quoted = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        const char c = line[i];
        if (quoted) {
            if (c == '"') {
                if (i + 1 < line.size() && line[i + 1] == '"') {
                    cur += '"';
                    ++i;
                } else {
                    quoted = false;
                }
            } else {
                cur += c;
            }
        } else if (c == '"') {
            quoted = true;
        } else if (c == ',') {
            fields.push_back(std::move(cur));
            cur.clear();
        } else if (c != '\r') {
            cur += c;
        }
    }
    fields.push_back(std::move(cur));
    return fields;
}

namespace {

bool parse_double(const std::string& field, double& out) {
    std::size_t begin = field.find_first_not_of(" \t");
    if (begin == std::string::npos) return false;
    const std::size_t end = field.find_last_not_of(" \t") + 1;
    const char* first = field.data() + begin;
    const char* last = field.data() + end;
    auto [ptr, ec] = std::from_chars(first, last, out);
    return ec == std::errc() && ptr == last;
}

}  // namespace

std::vector<Sample> read_sample_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw InputError("cannot open CSV file: " + path);
    std::vector<Sample> samples;
    std::string line;
    long row = 0;
    Eigen::Index dim = -1;
    while (std::getline(in, line)) {
        ++row;
        if (line.empty() || (line.size() == 1 && line[0] == '\r')) continue;
        const auto fields = parse_csv_line(line);
        Sample s(static_cast<Eigen::Index>(fields.size()));
        bool numeric = true;
        for (std::size_t i = 0; i < fields.size(); ++i) {
            if (!parse_double(fields[i], s[static_cast<Eigen::Index>(i)])) {
                numeric = false;
                break;
            }
        }
        if (!numeric) {
            if (row == 1) continue;  // optional header row
            throw NumericError("malformed CSV row " + std::to_string(row) + " in " + path);
        }
        if (dim < 0) {
            dim = s.size();
        } else if (s.size() != dim) {
            throw InputError("CSV row " + std::to_string(row) + " in " + path + " has " +
                             std::to_string(s.size()) + " columns, expected " +
                             std::to_string(dim));
        }
        samples.push_back(std::move(s));
    }
    return samples;
}

void write_sample_csv(const std::string& path, const std::vector<Sample>& samples,
                      bool header) {
    std::ofstream out(path);
    if (!out) throw InputError("cannot open for writing: " + path);
    if (header && !samples.empty()) {
        for (Eigen::Index i = 0; i < samples.front().size(); ++i) {
            out << (i ? "," : "") << "x" << i;
        }
        out << "\n";
    }
    std::ostringstream buf;
    buf.precision(17);
    for (const Sample& s : samples) {
        buf.str("");
        for (Eigen::Index i = 0; i < s.size(); ++i) {
            buf << (i ? "," : "") << s[i];
        }
        out << buf.str() << "\n";
    }
    if (!out) throw InputError("write failed: " + path);
}

}  // namespace scanb
