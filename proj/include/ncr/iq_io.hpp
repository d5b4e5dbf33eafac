#pragma once

// IQ batch file formats.
//
// CSV: header line `i1,q1,i2,q2`, one decimal row per sample.  Lines that
// start with '#' are comments.
//
// Binary: 16-byte header {magic "NCIQ", u32 version = 1, u64 count}, then
// count rows of four little-endian IEEE-754 doubles in (i1, q1, i2, q2)
// order.

#include "ncr/model.hpp"

#include <cstdint>
#include <filesystem>
#include <functional>
#include <iosfwd>
#include <string>

namespace ncr {

enum class IqFormat { Csv, Binary };

inline constexpr char kIqMagic[4] = {'N', 'C', 'I', 'Q'};
inline constexpr std::uint32_t kIqBinaryVersion = 1;

IQBatch read_iq_csv(std::istream& in);
void write_iq_csv(std::ostream& out, const IQBatch& batch);

IQBatch read_iq_binary(std::istream& in);
void write_iq_binary(std::ostream& out, const IQBatch& batch);

// Detects the format from the leading magic bytes.  Throws IoError when the
// file cannot be opened and FormatError when it is malformed.
IQBatch read_iq_file(const std::filesystem::path& path);
void write_iq_file(const std::filesystem::path& path, const IQBatch& batch,
                   IqFormat format);

// Writes to a sibling temporary file and renames it over `path`.
void write_file_atomically(const std::filesystem::path& path,
                           const std::function<void(std::ostream&)>& writer,
                           bool binary = false);

} // namespace ncr
