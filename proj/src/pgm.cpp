#include "occ/pgm.hpp"

#include "occ/error.hpp"

#include <cctype>
#include <fstream>
#include <iterator>
#include <string>

namespace occ {

std::vector<std::uint8_t> encode_pgm(const StripeImage& img) {
    if (img.bit_depth != 8 && img.bit_depth != 16) throw Error(ErrorKind::Io, "PGM: bit depth must be 8 or 16");
    if (img.pixels.size() != img.rows * img.cols) throw Error(ErrorKind::Shape, "PGM: pixel buffer size mismatch");
    const std::string header = "P5\n" + std::to_string(img.cols) + " " + std::to_string(img.rows) + "\n" +
                               std::to_string(img.max_pixel()) + "\n";
    std::vector<std::uint8_t> out(header.begin(), header.end());
    const bool wide = img.bit_depth == 16;
    out.reserve(out.size() + img.pixels.size() * (wide ? 2 : 1));
    for (std::uint16_t px : img.pixels) {
        if (wide) {
            out.push_back(static_cast<std::uint8_t>(px >> 8));
            out.push_back(static_cast<std::uint8_t>(px & 0xFF));
        } else {
            out.push_back(static_cast<std::uint8_t>(px));
        }
    }
    return out;
}

namespace {

class HeaderReader {
public:
    explicit HeaderReader(std::span<const std::uint8_t> bytes) : bytes_(bytes) {}

    void skip_space_and_comments() {
        while (pos_ < bytes_.size()) {
            if (bytes_[pos_] == '#') {
                while (pos_ < bytes_.size() && bytes_[pos_] != '\n') ++pos_;
            } else if (std::isspace(bytes_[pos_])) {
                ++pos_;
            } else {
                return;
            }
        }
    }

    std::size_t read_uint(const char* what) {
        skip_space_and_comments();
        std::size_t value = 0;
        std::size_t digits = 0;
        while (pos_ < bytes_.size() && std::isdigit(bytes_[pos_])) {
            value = value * 10 + (bytes_[pos_] - '0');
            if (value > (1u << 30)) throw Error(ErrorKind::Io, std::string("PGM: ") + what + " too large");
            ++pos_;
            ++digits;
        }
        if (digits == 0) throw Error(ErrorKind::Io, std::string("PGM: expected ") + what);
        return value;
    }

    std::size_t& pos() { return pos_; }

private:
    std::span<const std::uint8_t> bytes_;
    std::size_t pos_ = 0;
};

} // namespace

StripeImage decode_pgm(std::span<const std::uint8_t> bytes) {
    if (bytes.size() < 2 || bytes[0] != 'P' || bytes[1] != '5') throw Error(ErrorKind::Io, "PGM: missing P5 magic");
    HeaderReader reader(bytes);
    reader.pos() = 2;
    StripeImage img;
    img.cols = reader.read_uint("width");
    img.rows = reader.read_uint("height");
    if (img.cols == 0 || img.rows == 0) throw Error(ErrorKind::Io, "PGM: empty image");
    const std::size_t maxval = reader.read_uint("maxval");
    if (maxval == 255) {
        img.bit_depth = 8;
    } else if (maxval == 65535) {
        img.bit_depth = 16;
    } else {
        throw Error(ErrorKind::Io, "PGM: maxval must be 255 or 65535, got " + std::to_string(maxval));
    }
    std::size_t pos = reader.pos();
    if (pos >= bytes.size() || !std::isspace(bytes[pos])) throw Error(ErrorKind::Io, "PGM: malformed header");
    ++pos;
    const std::size_t per = img.bit_depth == 16 ? 2 : 1;
    const std::size_t n = img.rows * img.cols;
    if (bytes.size() - pos < n * per) throw Error(ErrorKind::Io, "PGM: truncated pixel data");
    img.pixels.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        if (per == 2) {
            img.pixels[i] = static_cast<std::uint16_t>((bytes[pos + 2 * i] << 8) | bytes[pos + 2 * i + 1]);
        } else {
            img.pixels[i] = bytes[pos + i];
        }
    }
    return img;
}

void write_pgm(const std::filesystem::path& path, const StripeImage& img) {
    const auto bytes = encode_pgm(img);
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error(ErrorKind::Io, "cannot open " + path.string() + " for writing");
    out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
    if (!out) throw Error(ErrorKind::Io, "failed writing " + path.string());
}

StripeImage read_pgm(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorKind::Io, "cannot open " + path.string());
    std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    return decode_pgm(bytes);
}

} // namespace occ
