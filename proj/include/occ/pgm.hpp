#pragma once

#include "occ/camera.hpp"

#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

namespace occ {

/// Binary PGM ("P5"): header "P5\n<cols> <rows>\n<maxval>\n", then
/// row-major big-endian samples (1 byte for 8-bit, 2 bytes for 16-bit).
std::vector<std::uint8_t> encode_pgm(const StripeImage& img);

/// Accepts any whitespace and '#' comments in the header. maxval must be 255
/// or 65535. Throws Error(Io) on malformed input.
StripeImage decode_pgm(std::span<const std::uint8_t> bytes);

void write_pgm(const std::filesystem::path& path, const StripeImage& img);
StripeImage read_pgm(const std::filesystem::path& path);

} // namespace occ
