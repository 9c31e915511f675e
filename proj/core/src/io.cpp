#include "gddim/io.hpp"

#include <bit>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <sstream>

#include "gddim/error.hpp"

namespace gddim {
namespace {

constexpr char kMagic[4] = {'G', 'D', 'D', 'M'};

std::string trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return std::string(s.substr(first, last - first + 1));
}

std::vector<std::string> split_commas(const std::string& line) {
  std::vector<std::string> cells;
  std::size_t start = 0;
  for (;;) {
    const auto pos = line.find(',', start);
    cells.push_back(trim(std::string_view(line).substr(start, pos - start)));
    if (pos == std::string::npos) break;
    start = pos + 1;
  }
  return cells;
}

bool parse_double(const std::string& cell, double& value) {
  const char* first = cell.data();
  const char* last = first + cell.size();
  if (first != last && *first == '+') ++first;
  auto [ptr, ec] = std::from_chars(first, last, value);
  return ec == std::errc{} && ptr == last;
}

class ByteWriter {
 public:
  void u32(std::uint32_t v) {
    for (int i = 0; i < 4; ++i) bytes_.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
  }
  void f32(float v) { u32(std::bit_cast<std::uint32_t>(v)); }
  void raw(const void* data, std::size_t n) {
    const auto* p = static_cast<const std::uint8_t*>(data);
    bytes_.insert(bytes_.end(), p, p + n);
  }
  std::vector<std::uint8_t> take() { return std::move(bytes_); }

 private:
  std::vector<std::uint8_t> bytes_;
};

class ByteReader {
 public:
  explicit ByteReader(const std::vector<std::uint8_t>& bytes) : bytes_(bytes) {}

  std::uint32_t u32(const char* what) {
    need(4, what);
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(bytes_[pos_ + static_cast<std::size_t>(i)]) << (8 * i);
    pos_ += 4;
    return v;
  }
  float f32(const char* what) { return std::bit_cast<float>(u32(what)); }
  std::string str(std::size_t n, const char* what) {
    need(n, what);
    std::string s(reinterpret_cast<const char*>(bytes_.data() + pos_), n);
    pos_ += n;
    return s;
  }
  std::size_t position() const { return pos_; }
  std::size_t size() const { return bytes_.size(); }

 private:
  void need(std::size_t n, const char* what) {
    if (pos_ + n > bytes_.size()) {
      throw FormatError(std::string("checkpoint truncated while reading ") + what + ": expected at least " +
                        std::to_string(pos_ + n) + " bytes, found " + std::to_string(bytes_.size()));
    }
  }

  const std::vector<std::uint8_t>& bytes_;
  std::size_t pos_ = 0;
};

}  // namespace

std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

void write_points_csv(std::ostream& out, const Points& points, const std::vector<std::string>& comments,
                      const std::vector<std::string>& columns) {
  for (const auto& c : comments) out << "# " << c << '\n';
  for (Eigen::Index j = 0; j < points.cols(); ++j) {
    if (j > 0) out << ',';
    const auto idx = static_cast<std::size_t>(j);
    out << (idx < columns.size() ? columns[idx] : "x" + std::to_string(j));
  }
  out << '\n';
  for (Eigen::Index i = 0; i < points.rows(); ++i) {
    for (Eigen::Index j = 0; j < points.cols(); ++j) {
      if (j > 0) out << ',';
      out << format_double(points(i, j));
    }
    out << '\n';
  }
}

void write_points_csv(const std::filesystem::path& path, const Points& points,
                      const std::vector<std::string>& comments, const std::vector<std::string>& columns) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw FormatError("cannot open '" + path.string() + "' for writing");
  write_points_csv(out, points, comments, columns);
  if (!out) throw FormatError("failed writing '" + path.string() + "'");
}

CsvTable read_csv(std::istream& in) {
  CsvTable table;
  std::vector<std::vector<double>> rows;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string text = trim(line);
    if (text.empty()) continue;
    if (text.front() == '#') {
      table.comments.push_back(trim(std::string_view(text).substr(1)));
      continue;
    }
    const auto cells = split_commas(text);
    std::vector<double> values(cells.size());
    bool numeric = true;
    for (std::size_t j = 0; j < cells.size(); ++j) numeric = numeric && parse_double(cells[j], values[j]);
    if (!numeric) {
      if (rows.empty() && table.columns.empty()) {
        table.columns = cells;
        continue;
      }
      throw FormatError("CSV line " + std::to_string(line_no) + ": non-numeric value");
    }
    if (!rows.empty() && values.size() != rows.front().size()) {
      throw FormatError("CSV line " + std::to_string(line_no) + ": expected " +
                        std::to_string(rows.front().size()) + " columns, found " + std::to_string(values.size()));
    }
    rows.push_back(std::move(values));
  }
  if (rows.empty()) throw FormatError("CSV contains no data rows");
  if (!table.columns.empty() && table.columns.size() != rows.front().size()) {
    throw FormatError("CSV header has " + std::to_string(table.columns.size()) + " columns but rows have " +
                      std::to_string(rows.front().size()));
  }
  const auto n = static_cast<Eigen::Index>(rows.size());
  const auto d = static_cast<Eigen::Index>(rows.front().size());
  table.values.resize(n, d);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < d; ++j) {
      table.values(i, j) = rows[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
    }
  }
  return table;
}

CsvTable read_csv(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FormatError("cannot read CSV '" + path.string() + "'");
  try {
    return read_csv(in);
  } catch (const FormatError& e) {
    throw FormatError(path.string() + ": " + e.what());
  }
}

Points read_points_csv(const std::filesystem::path& path) { return read_csv(path).values; }

std::vector<std::uint8_t> serialize_checkpoint(const Checkpoint& ckpt) {
  ByteWriter w;
  w.raw(kMagic, sizeof(kMagic));
  w.u32(kCheckpointVersion);
  const std::string tag = ckpt.family.name();
  w.u32(static_cast<std::uint32_t>(tag.size()));
  w.raw(tag.data(), tag.size());
  w.u32(ckpt.schedule == ScheduleKind::Linear ? 0U : 1U);
  w.u32(static_cast<std::uint32_t>(ckpt.T));
  const Architecture& arch = ckpt.net.architecture();
  w.u32(static_cast<std::uint32_t>(arch.hidden.size() + 2));
  w.u32(static_cast<std::uint32_t>(arch.data_dim));
  w.u32(static_cast<std::uint32_t>(arch.embed_dim));
  for (int width : arch.hidden) w.u32(static_cast<std::uint32_t>(width));
  for (double p : ckpt.net.parameters()) w.f32(static_cast<float>(p));
  return w.take();
}

Checkpoint deserialize_checkpoint(const std::vector<std::uint8_t>& bytes) {
  if (bytes.size() < 4 || std::memcmp(bytes.data(), kMagic, 4) != 0) {
    throw FormatError("not a checkpoint: magic bytes are not \"GDDM\"");
  }
  ByteReader r(bytes);
  r.str(4, "magic");
  const std::uint32_t version = r.u32("version");
  if (version != kCheckpointVersion) {
    throw FormatError("unsupported checkpoint version " + std::to_string(version) + " (this build reads version " +
                      std::to_string(kCheckpointVersion) + ")");
  }
  const std::uint32_t tag_len = r.u32("family tag length");
  if (tag_len > 256) throw FormatError("checkpoint family tag length " + std::to_string(tag_len) + " is implausible");
  Checkpoint ckpt;
  try {
    ckpt.family = parse_family(r.str(tag_len, "family tag"));
  } catch (const DomainError& e) {
    throw FormatError(std::string("checkpoint family tag: ") + e.what());
  }
  const std::uint32_t sched = r.u32("schedule kind");
  if (sched > 1) throw FormatError("checkpoint schedule kind " + std::to_string(sched) + " is unknown");
  ckpt.schedule = sched == 0 ? ScheduleKind::Linear : ScheduleKind::Cosine;
  ckpt.T = static_cast<int>(r.u32("T"));
  const std::uint32_t n_sizes = r.u32("layer-size count");
  if (n_sizes < 3 || n_sizes > 64) {
    throw FormatError("checkpoint layer-size count " + std::to_string(n_sizes) + " is invalid");
  }
  Architecture arch;
  arch.data_dim = static_cast<int>(r.u32("layer sizes"));
  arch.embed_dim = static_cast<int>(r.u32("layer sizes"));
  arch.hidden.clear();
  for (std::uint32_t i = 2; i < n_sizes; ++i) arch.hidden.push_back(static_cast<int>(r.u32("layer sizes")));
  for (int v : arch.hidden) {
    if (v < 1 || v > (1 << 16)) throw FormatError("checkpoint hidden width " + std::to_string(v) + " is invalid");
  }
  if (arch.data_dim < 1 || arch.data_dim > (1 << 16) || arch.embed_dim < 0 || arch.embed_dim > (1 << 16)) {
    throw FormatError("checkpoint data/embedding dimensions are invalid");
  }
  const std::size_t expected = r.position() + 4 * arch.parameter_count();
  if (bytes.size() != expected) {
    throw FormatError("checkpoint length mismatch: expected " + std::to_string(expected) + " bytes, found " +
                      std::to_string(bytes.size()));
  }
  try {
    ckpt.net = Approximator(arch);
  } catch (const Error& e) {
    throw FormatError(std::string("checkpoint architecture: ") + e.what());
  }
  for (double& p : ckpt.net.parameters()) p = static_cast<double>(r.f32("parameters"));
  return ckpt;
}

std::vector<std::uint8_t> read_file_bytes(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FormatError("cannot read '" + path.string() + "'");
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

void write_file_bytes(const std::filesystem::path& path, const std::vector<std::uint8_t>& bytes) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw FormatError("cannot open '" + path.string() + "' for writing");
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw FormatError("failed writing '" + path.string() + "'");
}

void save_checkpoint(const std::filesystem::path& path, const Checkpoint& ckpt) {
  write_file_bytes(path, serialize_checkpoint(ckpt));
}

Checkpoint load_checkpoint(const std::filesystem::path& path) { return deserialize_checkpoint(read_file_bytes(path)); }

}  // namespace gddim
