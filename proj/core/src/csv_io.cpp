#include "radml/csv_io.hpp"

#include <cctype>
#include <charconv>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <unordered_set>

namespace radml {

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> out;
    std::string field;
    for (char c : line) {
        if (c == ',') {
            out.push_back(field);
            field.clear();
        } else if (c != '\r') {
            field.push_back(c);
        }
    }
    out.push_back(field);
    return out;
}

double parse_value(const std::string& s, const std::string& path) {
    if (s.empty() || s == "NaN" || s == "nan" || s == "NAN") return missing_value();
    try {
        std::size_t pos = 0;
        double v = std::stod(s, &pos);
        if (pos != s.size()) throw std::invalid_argument(s);
        return v;
    } catch (const std::exception&) {
        throw DataError("bad numeric value '" + s + "' in " + path);
    }
}

void check_no_comma(const std::string& s, const char* what) {
    if (s.find(',') != std::string::npos || s.find('\n') != std::string::npos) {
        throw DataError(std::string(what) + " may not contain commas or newlines: " + s);
    }
}

} // namespace

std::string format_value(double v) {
    if (is_missing(v)) return "NaN";
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.12g", v);
    return buf;
}

void write_feature_table(const FeatureTable& table, const std::string& path) {
    table.validate();
    std::ofstream out(path, std::ios::binary);
    if (!out) throw DataError("cannot write feature table: " + path);
    out << "patient_id";
    for (const auto& name : table.feature_names()) {
        check_no_comma(name, "feature name");
        out << "," << name;
    }
    out << "\n";
    for (std::size_t r = 0; r < table.n_rows(); ++r) {
        check_no_comma(table.patient_ids()[r], "patient id");
        out << table.patient_ids()[r];
        for (std::size_t c = 0; c < table.n_cols(); ++c) {
            out << "," << format_value(table.get(r, c));
        }
        out << "\n";
    }
    if (!out) throw DataError("short write to " + path);
}

FeatureTable read_feature_table(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("cannot open feature table: " + path);
    std::string line;
    if (!std::getline(in, line)) throw DataError("empty feature table: " + path);
    auto header = split_csv_line(line);
    if (header.empty() || header[0] != "patient_id") {
        throw DataError("feature table must start with a patient_id column: " + path);
    }
    std::vector<std::string> names(header.begin() + 1, header.end());

    std::vector<std::string> ids;
    std::vector<std::vector<double>> rows;
    std::unordered_set<std::string> seen;
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        auto fields = split_csv_line(line);
        if (fields.size() != header.size()) {
            throw DataError("row " + std::to_string(line_no) + " has " + std::to_string(fields.size()) +
                            " fields, header has " + std::to_string(header.size()) + ": " + path);
        }
        if (!seen.insert(fields[0]).second) {
            throw DataError("duplicate patient id '" + fields[0] + "' in " + path);
        }
        ids.push_back(fields[0]);
        std::vector<double> row;
        row.reserve(names.size());
        for (std::size_t i = 1; i < fields.size(); ++i) row.push_back(parse_value(fields[i], path));
        rows.push_back(std::move(row));
    }

    FeatureTable table(std::move(ids), std::move(names));
    for (std::size_t r = 0; r < rows.size(); ++r) {
        for (std::size_t c = 0; c < rows[r].size(); ++c) table.set(r, c, rows[r][c]);
    }
    table.validate();
    return table;
}

void write_manifest(const std::vector<PatientRecord>& records, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw DataError("cannot write manifest: " + path);
    out << "patient_id,label,age,sex,location,batch,image_path,mask_path\n";
    for (const auto& r : records) {
        check_no_comma(r.id, "patient id");
        out << r.id << "," << r.label << ",";
        if (r.age) out << format_value(*r.age);
        out << ",";
        if (r.sex) out << *r.sex;
        out << ",";
        if (r.location) out << *r.location;
        out << ",";
        if (r.batch) out << *r.batch;
        out << "," << r.image_path << "," << r.mask_path << "\n";
    }
    if (!out) throw DataError("short write to " + path);
}

std::vector<PatientRecord> read_manifest(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("cannot open manifest: " + path);
    std::string line;
    if (!std::getline(in, line)) throw DataError("empty manifest: " + path);
    auto header = split_csv_line(line);
    const std::vector<std::string> expected = {"patient_id", "label",    "age",
                                               "sex",        "location", "batch",
                                               "image_path", "mask_path"};
    if (header != expected) {
        throw DataError("manifest header mismatch in " + path);
    }

    const auto base = std::filesystem::path(path).parent_path();
    auto resolve = [&](const std::string& p) {
        if (p.empty()) return p;
        std::filesystem::path fp(p);
        if (fp.is_absolute()) return p;
        return (base / fp).string();
    };

    std::vector<PatientRecord> records;
    std::unordered_set<std::string> seen;
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        auto f = split_csv_line(line);
        if (f.size() != expected.size()) {
            throw DataError("manifest row " + std::to_string(line_no) + " has wrong arity: " + path);
        }
        PatientRecord r;
        r.id = f[0];
        if (r.id.empty()) throw DataError("empty patient id at manifest row " + std::to_string(line_no));
        if (!seen.insert(r.id).second) throw DataError("duplicate patient id '" + r.id + "' in " + path);
        if (f[1] == "0") r.label = 0;
        else if (f[1] == "1") r.label = 1;
        else throw DataError("label must be 0 or 1 at manifest row " + std::to_string(line_no) + ": " + path);
        if (!f[2].empty()) {
            double age = parse_value(f[2], path);
            if (!is_missing(age)) r.age = age;
        }
        if (!f[3].empty()) {
            if (f[3] != "M" && f[3] != "F") {
                throw DataError("sex must be M or F at manifest row " + std::to_string(line_no) + ": " + path);
            }
            r.sex = f[3][0];
        }
        if (!f[4].empty()) r.location = f[4];
        if (!f[5].empty()) r.batch = f[5];
        r.image_path = resolve(f[6]);
        r.mask_path = resolve(f[7]);
        records.push_back(std::move(r));
    }
    if (records.empty()) throw DataError("manifest has no rows: " + path);
    return records;
}

void write_scores(const std::vector<std::string>& ids, const std::vector<double>& scores,
                  const std::string& path, const std::string& value_column) {
    if (ids.size() != scores.size()) throw DataError("id/score length mismatch");
    std::ofstream out(path, std::ios::binary);
    if (!out) throw DataError("cannot write scores: " + path);
    out << "patient_id," << value_column << "\n";
    for (std::size_t i = 0; i < ids.size(); ++i) {
        check_no_comma(ids[i], "patient id");
        out << ids[i] << "," << format_value(scores[i]) << "\n";
    }
}

void read_scores(const std::string& path, std::vector<std::string>& ids, std::vector<double>& scores) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("cannot open scores: " + path);
    std::string line;
    if (!std::getline(in, line)) throw DataError("empty scores file: " + path);
    auto header = split_csv_line(line);
    if (header.size() != 2 || header[0] != "patient_id") {
        throw DataError("scores file must have columns patient_id,<value>: " + path);
    }
    ids.clear();
    scores.clear();
    std::unordered_set<std::string> seen;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        auto f = split_csv_line(line);
        if (f.size() != 2) throw DataError("bad row in scores file: " + path);
        if (!seen.insert(f[0]).second) throw DataError("duplicate patient id '" + f[0] + "' in " + path);
        ids.push_back(f[0]);
        scores.push_back(parse_value(f[1], path));
    }
}

} // namespace radml
