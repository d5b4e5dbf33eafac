#include "ncr/iq_io.hpp"

#include "ncr/errors.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <charconv>
#include <cmath>
#include <cstring>
#include <fstream>
#include <iomanip>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>
#include <string_view>

namespace ncr {
namespace {

std::string_view trim(std::string_view s) {
    const auto first = s.find_first_not_of(" \t\r\n");
    if (first == std::string_view::npos) return {};
    const auto last = s.find_last_not_of(" \t\r\n");
    return s.substr(first, last - first + 1);
}

double parse_number(std::string_view field, std::size_t line_no) {
    field = trim(field);
    if (!field.empty() && field.front() == '+') field.remove_prefix(1);
    double value = 0.0;
    const auto* end = field.data() + field.size();
    const auto [ptr, ec] = std::from_chars(field.data(), end, value);
    if (field.empty() || ec != std::errc{} || ptr != end || !std::isfinite(value))
        throw FormatError("line " + std::to_string(line_no) +
                          ": invalid number '" + std::string(field) + "'");
    return value;
}

template <typename T>
T to_little_endian(T v) {
    if constexpr (std::endian::native == std::endian::big) {
        auto bytes = std::bit_cast<std::array<unsigned char, sizeof(T)>>(v);
        std::reverse(bytes.begin(), bytes.end());
        return std::bit_cast<T>(bytes);
    } else {
        return v;
    }
}

template <typename T>
void put(std::ostream& out, T v) {
    v = to_little_endian(v);
    out.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <typename T>
T get(std::istream& in, const char* what) {
    T v{};
    in.read(reinterpret_cast<char*>(&v), sizeof(T));
    if (in.gcount() != static_cast<std::streamsize>(sizeof(T)))
        throw FormatError(std::string("truncated binary IQ file while reading ") + what);
    return to_little_endian(v);
}

} // namespace

IQBatch read_iq_csv(std::istream& in) {
    IQBatch batch;
    std::string line;
    std::size_t line_no = 0;
    bool have_header = false;
    while (std::getline(in, line)) {
        ++line_no;
        const auto view = trim(line);
        if (view.empty() || view.front() == '#') continue;
        if (!have_header) {
            std::string header;
            for (char ch : view)
                if (ch != ' ' && ch != '\t') header.push_back(ch);
            if (header != "i1,q1,i2,q2")
                throw FormatError("expected header 'i1,q1,i2,q2', got '" +
                                  std::string(view) + "'");
            have_header = true;
            continue;
        }
        std::array<double, 4> row{};
        std::size_t start = 0;
        for (int c = 0; c < 4; ++c) {
            const auto comma = view.find(',', start);
            const bool last = c == 3;
            if (last != (comma == std::string_view::npos))
                throw FormatError("line " + std::to_string(line_no) +
                                  ": expected 4 comma-separated fields");
            const auto field = view.substr(start, last ? std::string_view::npos
                                                       : comma - start);
            row[c] = parse_number(field, line_no);
            start = comma + 1;
        }
        batch.push_back(row[0], row[1], row[2], row[3]);
    }
    if (!have_header) throw FormatError("missing CSV header");
    if (batch.size() == 0) throw FormatError("IQ file contains no samples");
    return batch;
}

void write_iq_csv(std::ostream& out, const IQBatch& batch) {
    out << "i1,q1,i2,q2\n";
    out << std::setprecision(std::numeric_limits<double>::max_digits10);
    for (std::size_t k = 0; k < batch.size(); ++k)
        out << batch.i1[k] << ',' << batch.q1[k] << ',' << batch.i2[k] << ','
            << batch.q2[k] << '\n';
}

IQBatch read_iq_binary(std::istream& in) {
    char magic[4];
    in.read(magic, 4);
    if (in.gcount() != 4 || std::memcmp(magic, kIqMagic, 4) != 0)
        throw FormatError("bad magic: not an NCIQ file");
    const auto version = get<std::uint32_t>(in, "version");
    if (version != kIqBinaryVersion)
        throw FormatError("unsupported NCIQ version " + std::to_string(version));
    const auto count = get<std::uint64_t>(in, "count");
    if (count == 0) throw FormatError("IQ file contains no samples");
    if (count > (std::uint64_t{1} << 40)) throw FormatError("implausible sample count");
    IQBatch batch(static_cast<std::size_t>(count));
    for (std::size_t k = 0; k < batch.size(); ++k) {
        batch.i1[k] = get<double>(in, "samples");
        batch.q1[k] = get<double>(in, "samples");
        batch.i2[k] = get<double>(in, "samples");
        batch.q2[k] = get<double>(in, "samples");
    }
    if (in.peek() != std::char_traits<char>::eof())
        throw FormatError("trailing bytes after NCIQ payload");
    return batch;
}

void write_iq_binary(std::ostream& out, const IQBatch& batch) {
    out.write(kIqMagic, 4);
    put<std::uint32_t>(out, kIqBinaryVersion);
    put<std::uint64_t>(out, batch.size());
    for (std::size_t k = 0; k < batch.size(); ++k) {
        put(out, batch.i1[k]);
        put(out, batch.q1[k]);
        put(out, batch.i2[k]);
        put(out, batch.q2[k]);
    }
}

IQBatch read_iq_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open '" + path.string() + "'");
    char magic[4] = {};
    in.read(magic, 4);
    const bool binary = in.gcount() == 4 && std::memcmp(magic, kIqMagic, 4) == 0;
    in.clear();
    in.seekg(0);
    return binary ? read_iq_binary(in) : read_iq_csv(in);
}

void write_iq_file(const std::filesystem::path& path, const IQBatch& batch,
                   IqFormat format) {
    const bool binary = format == IqFormat::Binary;
    write_file_atomically(
        path,
        [&](std::ostream& out) {
            if (binary)
                write_iq_binary(out, batch);
            else
                write_iq_csv(out, batch);
        },
        binary);
}

void write_file_atomically(const std::filesystem::path& path,
                           const std::function<void(std::ostream&)>& writer,
                           bool binary) {
    auto tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, binary ? std::ios::binary | std::ios::trunc
                                      : std::ios::trunc);
        if (!out) throw IoError("cannot open '" + tmp.string() + "' for writing");
        writer(out);
        out.flush();
        if (!out) throw IoError("write failed for '" + tmp.string() + "'");
    }
    std::error_code ec;
    std::filesystem::rename(tmp, path, ec);
    if (ec) {
        std::filesystem::remove(tmp, ec);
        throw IoError("cannot rename onto '" + path.string() + "'");
    }
}

} // namespace ncr
