#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "gddim/approximator.hpp"
#include "gddim/noise_family.hpp"
#include "gddim/schedule.hpp"
#include "gddim/types.hpp"

namespace gddim {

// ---------------------------------------------------------------- CSV

/// Parsed CSV: optional header names, numeric body, and the text of any
/// '#'-prefixed comment lines (prefix stripped).
struct CsvTable {
  std::vector<std::string> columns;
  Points values;
  std::vector<std::string> comments;
};

/// Writes comment lines as "# <text>", then a header row, then one row per
/// point with 17 significant digits and '.' decimal separators. Column names
/// default to x0, x1, ...
void write_points_csv(std::ostream& out, const Points& points, const std::vector<std::string>& comments = {},
                      const std::vector<std::string>& columns = {});
void write_points_csv(const std::filesystem::path& path, const Points& points,
                      const std::vector<std::string>& comments = {}, const std::vector<std::string>& columns = {});

CsvTable read_csv(std::istream& in);
CsvTable read_csv(const std::filesystem::path& path);
Points read_points_csv(const std::filesystem::path& path);

/// Formats with 17 significant digits ("%.17g").
std::string format_double(double v);

// --------------------------------------------------------- checkpoints

inline constexpr std::uint32_t kCheckpointVersion = 1;

/// Trained approximator together with the diffusion setup it was trained for.
struct Checkpoint {
  FamilyKind family;
  ScheduleKind schedule = ScheduleKind::Linear;
  int T = 1000;
  Approximator net{Architecture{}};
};

/// Binary layout, all integers little-endian:
///   "GDDM"                       4 bytes
///   version                      u32
///   family tag length, bytes     u32, UTF-8 (e.g. "student_t:3")
///   schedule kind                u32 (0 linear, 1 cosine)
///   T                            u32
///   layer-size count, sizes      u32, then u32 each:
///                                data_dim, embed_dim, hidden widths...
///   parameters                   f32 each, flat layer order
/// Parameters are rounded to float32 on save.
std::vector<std::uint8_t> serialize_checkpoint(const Checkpoint& ckpt);

/// Throws FormatError on foreign magic, unsupported version, malformed
/// header, or a byte count that does not match the declared layer sizes.
Checkpoint deserialize_checkpoint(const std::vector<std::uint8_t>& bytes);

void save_checkpoint(const std::filesystem::path& path, const Checkpoint& ckpt);
Checkpoint load_checkpoint(const std::filesystem::path& path);

std::vector<std::uint8_t> read_file_bytes(const std::filesystem::path& path);
void write_file_bytes(const std::filesystem::path& path, const std::vector<std::uint8_t>& bytes);

}  // namespace gddim
