#include "radml/mhd_io.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>

namespace radml {

namespace {

struct Header {
    std::array<std::size_t, 3> dims{};
    std::array<double, 3> spacing{};
    ElementKind kind = ElementKind::Float;
    std::string data_file;          // "LOCAL" or a file name
    std::streamoff local_offset = 0; // payload offset when data_file == LOCAL
};

std::string trim(const std::string& s) {
    std::size_t a = s.find_first_not_of(" \t\r\n");
    std::size_t b = s.find_last_not_of(" \t\r\n");
    if (a == std::string::npos) return "";
    return s.substr(a, b - a + 1);
}

Header parse_header(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("cannot open header: " + path);

    std::map<std::string, std::string> kv;
    std::string line;
    std::streamoff offset = 0;
    while (std::getline(in, line)) {
        offset = in.tellg();
        auto eq = line.find('=');
        if (eq == std::string::npos) continue;
        std::string key = trim(line.substr(0, eq));
        std::string value = trim(line.substr(eq + 1));
        kv[key] = value;
        if (key == "ElementDataFile") break; // header ends here by convention
    }

    for (const char* required : {"NDims", "DimSize", "ElementSpacing", "ElementType", "ElementDataFile"}) {
        if (!kv.count(required)) {
            throw DataError(std::string("missing header key ") + required + " in " + path);
        }
    }
    if (trim(kv["NDims"]) != "3") throw DataError("NDims must be 3 in " + path);

    Header h;
    {
        std::istringstream ss(kv["DimSize"]);
        long long nx = 0, ny = 0, nz = 0;
        if (!(ss >> nx >> ny >> nz) || nx <= 0 || ny <= 0 || nz <= 0) {
            throw DataError("bad DimSize in " + path);
        }
        h.dims = {static_cast<std::size_t>(nx), static_cast<std::size_t>(ny), static_cast<std::size_t>(nz)};
    }
    {
        std::istringstream ss(kv["ElementSpacing"]);
        if (!(ss >> h.spacing[0] >> h.spacing[1] >> h.spacing[2])) {
            throw DataError("bad ElementSpacing in " + path);
        }
    }
    const std::string& t = kv["ElementType"];
    if (t == "MET_SHORT") h.kind = ElementKind::Short;
    else if (t == "MET_FLOAT") h.kind = ElementKind::Float;
    else if (t == "MET_UCHAR") h.kind = ElementKind::Uchar;
    else throw DataError("unsupported ElementType " + t + " in " + path);

    h.data_file = kv["ElementDataFile"];
    h.local_offset = offset;
    return h;
}

std::size_t element_size(ElementKind k) {
    switch (k) {
        case ElementKind::Short: return 2;
        case ElementKind::Float: return 4;
        case ElementKind::Uchar: return 1;
    }
    return 0;
}

std::vector<double> read_payload(const Header& h, const std::string& header_path) {
    const std::size_t count = h.dims[0] * h.dims[1] * h.dims[2];
    const std::size_t bytes = count * element_size(h.kind);

    std::string data_path = header_path;
    std::streamoff offset = 0;
    if (h.data_file == "LOCAL") {
        offset = h.local_offset;
    } else {
        data_path = (std::filesystem::path(header_path).parent_path() / h.data_file).string();
    }

    std::ifstream in(data_path, std::ios::binary);
    if (!in) throw DataError("cannot open element data: " + data_path);
    in.seekg(0, std::ios::end);
    const std::streamoff total = in.tellg();
    if (total - offset != static_cast<std::streamoff>(bytes)) {
        throw DataError("element count mismatch in " + data_path + " (expected " +
                        std::to_string(bytes) + " payload bytes, found " +
                        std::to_string(static_cast<long long>(total - offset)) + ")");
    }
    in.seekg(offset);
    std::vector<char> raw(bytes);
    in.read(raw.data(), static_cast<std::streamsize>(bytes));
    if (!in) throw DataError("short read from " + data_path);

    std::vector<double> out(count);
    switch (h.kind) {
        case ElementKind::Short: {
            for (std::size_t i = 0; i < count; ++i) {
                std::int16_t v;
                std::memcpy(&v, raw.data() + 2 * i, 2);
                out[i] = static_cast<double>(v);
            }
            break;
        }
        case ElementKind::Float: {
            for (std::size_t i = 0; i < count; ++i) {
                float v;
                std::memcpy(&v, raw.data() + 4 * i, 4);
                out[i] = static_cast<double>(v);
            }
            break;
        }
        case ElementKind::Uchar: {
            for (std::size_t i = 0; i < count; ++i) {
                out[i] = static_cast<double>(static_cast<unsigned char>(raw[i]));
            }
            break;
        }
    }
    return out;
}

void write_pair(const std::array<std::size_t, 3>& dims, const std::array<double, 3>& spacing,
                ElementKind kind, const std::vector<double>& values, const std::string& path) {
    std::filesystem::path header_path(path);
    if (header_path.extension() != ".mhd") header_path += ".mhd";
    std::filesystem::path raw_path = header_path;
    raw_path.replace_extension(".raw");

    const char* type_name = kind == ElementKind::Short ? "MET_SHORT"
                          : kind == ElementKind::Float ? "MET_FLOAT"
                                                       : "MET_UCHAR";

    std::ofstream hdr(header_path, std::ios::binary);
    if (!hdr) throw DataError("cannot write header: " + header_path.string());
    std::ostringstream spacing_ss;
    spacing_ss.precision(17);
    spacing_ss << spacing[0] << " " << spacing[1] << " " << spacing[2];
    hdr << "ObjectType = Image\n"
        << "NDims = 3\n"
        << "BinaryData = True\n"
        << "ElementByteOrderMSB = False\n"
        << "DimSize = " << dims[0] << " " << dims[1] << " " << dims[2] << "\n"
        << "ElementSpacing = " << spacing_ss.str() << "\n"
        << "ElementType = " << type_name << "\n"
        << "ElementDataFile = " << raw_path.filename().string() << "\n";
    hdr.close();

    std::ofstream raw(raw_path, std::ios::binary);
    if (!raw) throw DataError("cannot write element data: " + raw_path.string());
    switch (kind) {
        case ElementKind::Short: {
            for (double d : values) {
                auto v = static_cast<std::int16_t>(std::lrint(d));
                raw.write(reinterpret_cast<const char*>(&v), 2);
            }
            break;
        }
        case ElementKind::Float: {
            for (double d : values) {
                auto v = static_cast<float>(d);
                raw.write(reinterpret_cast<const char*>(&v), 4);
            }
            break;
        }
        case ElementKind::Uchar: {
            for (double d : values) {
                auto v = static_cast<unsigned char>(d > 0.0 ? (d > 255.0 ? 255 : std::lrint(d)) : 0);
                raw.write(reinterpret_cast<const char*>(&v), 1);
            }
            break;
        }
    }
    if (!raw) throw DataError("short write to " + raw_path.string());
}

} // namespace

ImageVolume read_image(const std::string& path) {
    Header h = parse_header(path);
    ImageVolume v;
    v.dims = h.dims;
    v.spacing = h.spacing;
    v.element_kind = h.kind;
    v.voxels = read_payload(h, path);
    v.validate();
    return v;
}

RoiMask read_mask(const std::string& path) {
    Header h = parse_header(path);
    RoiMask m;
    m.dims = h.dims;
    m.spacing = h.spacing;
    std::vector<double> values = read_payload(h, path);
    m.voxels.resize(values.size());
    for (std::size_t i = 0; i < values.size(); ++i) m.voxels[i] = values[i] > 0.0 ? 1 : 0;
    m.validate();
    return m;
}

void write_image(const ImageVolume& volume, const std::string& path) {
    volume.validate();
    write_pair(volume.dims, volume.spacing, volume.element_kind, volume.voxels, path);
}

void write_mask(const RoiMask& mask, const std::string& path) {
    mask.validate();
    std::vector<double> values(mask.voxels.begin(), mask.voxels.end());
    write_pair(mask.dims, mask.spacing, ElementKind::Uchar, values, path);
}

} // namespace radml
