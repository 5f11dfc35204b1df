#include "ttutv/io.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <fmt/format.h>

namespace ttutv {

namespace {

// All integers and doubles are serialized little-endian byte by byte, so the
// files are identical across hosts and round trips are bitwise exact.

void put_u32(std::string& out, std::uint32_t v) {
    for (int i = 0; i < 4; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
}

void put_u64(std::string& out, std::uint64_t v) {
    for (int i = 0; i < 8; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
}

void put_f64(std::string& out, double v) { put_u64(out, std::bit_cast<std::uint64_t>(v)); }

class Reader {
public:
    Reader(std::string bytes, std::string path) : bytes_(std::move(bytes)), path_(std::move(path)) {}

    std::int64_t offset() const { return pos_; }

    void expect_magic(const char* magic) {
        if (remaining() < 8 || std::memcmp(bytes_.data(), magic, 8) != 0)
            throw ParseError(fmt::format("{}: bad magic, not a recognized container", path_), 0);
        pos_ += 8;
    }

    std::uint32_t get_u32(const char* what) {
        require(4, what);
        std::uint32_t v = 0;
        for (int i = 0; i < 4; ++i)
            v |= static_cast<std::uint32_t>(static_cast<unsigned char>(bytes_[pos_ + i])) << (8 * i);
        pos_ += 4;
        return v;
    }

    std::uint64_t get_u64(const char* what) {
        require(8, what);
        std::uint64_t v = 0;
        for (int i = 0; i < 8; ++i)
            v |= static_cast<std::uint64_t>(static_cast<unsigned char>(bytes_[pos_ + i])) << (8 * i);
        pos_ += 8;
        return v;
    }

    void get_payload(std::vector<double>& out, std::int64_t count, const char* what) {
        const std::int64_t need = count * 8;
        if (remaining() < need)
            throw ParseError(fmt::format("{}: truncated {}: need {} bytes, {} left", path_, what,
                                         need, remaining()),
                             pos_);
        out.resize(static_cast<std::size_t>(count));
        for (std::int64_t i = 0; i < count; ++i) {
            std::uint64_t v = 0;
            for (int b = 0; b < 8; ++b)
                v |= static_cast<std::uint64_t>(static_cast<unsigned char>(bytes_[pos_ + i * 8 + b]))
                     << (8 * b);
            out[static_cast<std::size_t>(i)] = std::bit_cast<double>(v);
        }
        pos_ += need;
    }

    void expect_end() {
        if (remaining() != 0)
            throw ParseError(fmt::format("{}: {} trailing bytes after payload", path_, remaining()),
                             pos_);
    }

private:
    std::int64_t remaining() const { return static_cast<std::int64_t>(bytes_.size()) - pos_; }

    void require(std::int64_t n, const char* what) {
        if (remaining() < n)
            throw ParseError(fmt::format("{}: truncated header while reading {}", path_, what), pos_);
    }

    std::string bytes_;
    std::string path_;
    std::int64_t pos_ = 0;
};

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ParseError(fmt::format("{}: cannot open for reading", path), 0);
    std::ostringstream buf;
    buf << in.rdbuf();
    return std::move(buf).str();
}

void spill(const std::string& path, const std::string& bytes) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw ParseError(fmt::format("{}: cannot open for writing", path), 0);
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    if (!out) throw ParseError(fmt::format("{}: short write", path), 0);
}

Shape read_dims(Reader& reader, std::uint32_t order, const std::string& path) {
    if (order < 1 || order > 255)
        throw ParseError(fmt::format("{}: order {} out of the supported range 1..255", path, order),
                         reader.offset() - 4);
    std::vector<std::int64_t> dims;
    dims.reserve(order);
    for (std::uint32_t k = 0; k < order; ++k) {
        const std::int64_t at = reader.offset();
        const std::uint64_t dim = reader.get_u64("dims");
        if (dim < 1 || dim > static_cast<std::uint64_t>(INT64_MAX / 8))
            throw ParseError(fmt::format("{}: dim {} is invalid ({})", path, k + 1, dim), at);
        dims.push_back(static_cast<std::int64_t>(dim));
    }
    try {
        return Shape(std::move(dims));
    } catch (const ArgumentError& e) {
        throw ParseError(fmt::format("{}: {}", path, e.what()), reader.offset());
    }
}

void check_version(Reader& reader, const std::string& path) {
    const std::int64_t at = reader.offset();
    const std::uint32_t version = reader.get_u32("version");
    if (version != kFileVersion)
        throw ParseError(fmt::format("{}: unsupported version {}", path, version), at);
}

}  // namespace

void write_tensor(const std::string& path, const DenseTensor& tensor) {
    std::string bytes;
    bytes.reserve(16 + static_cast<std::size_t>(tensor.order()) * 8 +
                  static_cast<std::size_t>(tensor.element_count()) * 8);
    bytes.append(kTensorMagic, 8);
    put_u32(bytes, kFileVersion);
    put_u32(bytes, static_cast<std::uint32_t>(tensor.order()));
    for (std::int64_t dim : tensor.shape().dims()) put_u64(bytes, static_cast<std::uint64_t>(dim));
    for (std::int64_t i = 0; i < tensor.element_count(); ++i) put_f64(bytes, tensor[i]);
    spill(path, bytes);
}

DenseTensor read_tensor(const std::string& path) {
    Reader reader(slurp(path), path);
    reader.expect_magic(kTensorMagic);
    check_version(reader, path);
    const std::uint32_t order = reader.get_u32("order");
    Shape shape = read_dims(reader, order, path);
    std::vector<double> payload;
    reader.get_payload(payload, shape.element_count(), "tensor payload");
    reader.expect_end();
    return DenseTensor(std::move(shape), std::move(payload));
}

void write_tt(const std::string& path, const TTTensor& tt) {
    std::string bytes;
    bytes.append(kTrainMagic, 8);
    put_u32(bytes, kFileVersion);
    put_u32(bytes, static_cast<std::uint32_t>(tt.order()));
    const Shape shape = tt.shape();
    for (std::int64_t r : tt.ranks()) put_u64(bytes, static_cast<std::uint64_t>(r));
    for (std::int64_t dim : shape.dims()) put_u64(bytes, static_cast<std::uint64_t>(dim));
    for (const TTCore& core : tt.cores())
        for (std::int64_t i = 0; i < core.data.element_count(); ++i) put_f64(bytes, core.data[i]);
    spill(path, bytes);
}

TTTensor read_tt(const std::string& path) {
    Reader reader(slurp(path), path);
    reader.expect_magic(kTrainMagic);
    check_version(reader, path);
    const std::uint32_t order = reader.get_u32("order");
    if (order < 1 || order > 255)
        throw ParseError(fmt::format("{}: order {} out of the supported range 1..255", path, order),
                         reader.offset() - 4);
    std::vector<std::int64_t> ranks;
    ranks.reserve(order + 1);
    for (std::uint32_t k = 0; k <= order; ++k) {
        const std::int64_t at = reader.offset();
        const std::uint64_t r = reader.get_u64("ranks");
        if (r < 1 || r > static_cast<std::uint64_t>(INT64_MAX / 8))
            throw ParseError(fmt::format("{}: rank {} is invalid ({})", path, k, r), at);
        ranks.push_back(static_cast<std::int64_t>(r));
    }
    Shape shape = read_dims(reader, order, path);
    if (ranks.front() != 1 || ranks.back() != 1)
        throw ParseError(fmt::format("{}: boundary ranks must be 1", path), 16);

    std::vector<TTCore> cores;
    cores.reserve(order);
    for (std::uint32_t k = 0; k < order; ++k) {
        Shape core_shape({ranks[k], shape.dim(k + 1), ranks[k + 1]});
        std::vector<double> payload;
        reader.get_payload(payload, core_shape.element_count(), "core payload");
        cores.push_back(TTCore{DenseTensor(std::move(core_shape), std::move(payload))});
    }
    reader.expect_end();
    try {
        return TTTensor(std::move(cores));
    } catch (const ArgumentError& e) {
        throw ParseError(fmt::format("{}: {}", path, e.what()), 16);
    }
}

DenseTensor read_tensor_text(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParseError(fmt::format("{}: cannot open for reading", path), 0);
    std::string line;
    std::int64_t line_no = 0;

    auto next_content_line = [&]() -> bool {
        while (std::getline(in, line)) {
            ++line_no;
            const auto first = line.find_first_not_of(" \t\r");
            if (first == std::string::npos || line[first] == '#') continue;
            return true;
        }
        return false;
    };

    if (!next_content_line())
        throw ParseError(fmt::format("{}: missing dims header line", path), line_no);
    std::vector<std::int64_t> dims;
    {
        std::istringstream header(line);
        std::int64_t dim = 0;
        while (header >> dim) dims.push_back(dim);
        if (!header.eof())
            throw ParseError(fmt::format("{}: dims header holds a non-integer token", path), line_no);
        if (dims.empty())
            throw ParseError(fmt::format("{}: dims header line is empty", path), line_no);
    }
    Shape shape;
    try {
        shape = Shape(std::move(dims));
    } catch (const ArgumentError& e) {
        throw ParseError(fmt::format("{}: {}", path, e.what()), line_no);
    }

    DenseTensor out{shape};
    for (std::int64_t i = 0; i < shape.element_count(); ++i) {
        if (!next_content_line())
            throw ParseError(fmt::format("{}: expected {} values, file ended after {}", path,
                                         shape.element_count(), i),
                             line_no);
        std::istringstream value_line(line);
        double value = 0.0;
        if (!(value_line >> value))
            throw ParseError(fmt::format("{}: value {} is not a number", path, i + 1), line_no);
        std::string extra;
        if (value_line >> extra)
            throw ParseError(fmt::format("{}: value line holds extra token '{}'", path, extra),
                             line_no);
        out[i] = value;
    }
    if (next_content_line())
        throw ParseError(fmt::format("{}: extra content after the last value", path), line_no);
    return out;
}

std::string sniff_kind(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ParseError(fmt::format("{}: cannot open for reading", path), 0);
    char magic[8] = {};
    in.read(magic, 8);
    if (in.gcount() == 8 && std::memcmp(magic, kTensorMagic, 8) == 0) return "tensor";
    if (in.gcount() == 8 && std::memcmp(magic, kTrainMagic, 8) == 0) return "train";
    throw ParseError(fmt::format("{}: bad magic, not a recognized container", path), 0);
}

}  // namespace ttutv
