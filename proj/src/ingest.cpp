#include "pdr/ingest.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include "pdr/config.hpp"
#include "pdr/zvd.hpp"

namespace pdr {

namespace {

constexpr const char* kHeader = "t,fx,fy,fz,wx,wy,wz";

// Lower median: for an even count the smaller middle value, so a single
// outlier interval can never drag the reference interval upwards.
double median(std::vector<double> values) {
  const auto mid = values.begin() + static_cast<std::ptrdiff_t>((values.size() - 1) / 2);
  std::nth_element(values.begin(), mid, values.end());
  return *mid;
}

void append_number(std::string& out, double value) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof(buf), value);
  out.append(buf, res.ptr);
}

ImuLog validate_gaps(ImuLog log, const IngestConfig& config) {
  double max_dt = 0.0;
  std::size_t max_at = 1;
  std::vector<double> dts;
  dts.reserve(log.size() - 1);
  for (std::size_t n = 1; n < log.size(); ++n) {
    dts.push_back(log.dt(n));
    if (dts.back() > max_dt) {
      max_dt = dts.back();
      max_at = n;
    }
  }
  const double med = median(std::move(dts));
  if (max_dt >= config.gap_factor * med) {
    std::ostringstream msg;
    msg << "gap of " << max_dt << " s before sample " << max_at << " exceeds " << config.gap_factor
        << " x median interval (" << med << " s)";
    throw GapError(msg.str());
  }
  return log;
}

}  // namespace

ImuLog make_log(std::vector<ImuSample> samples) {
  if (samples.size() < 2) throw InputError("ingest", "log needs at least 2 samples");
  for (std::size_t n = 0; n < samples.size(); ++n) {
    const auto& s = samples[n];
    if (!std::isfinite(s.t) || s.t < 0.0)
      throw InputError("ingest", "sample " + std::to_string(n) + ": bad timestamp");
    if (!s.f.allFinite() || !s.w.allFinite())
      throw InputError("ingest", "sample " + std::to_string(n) + ": non-finite channel");
    if (n > 0 && !(s.t > samples[n - 1].t))
      throw OrderingError("timestamps not strictly increasing at sample " + std::to_string(n));
  }
  std::vector<double> dts(samples.size() - 1);
  for (std::size_t n = 1; n < samples.size(); ++n) dts[n - 1] = samples[n].t - samples[n - 1].t;
  ImuLog log;
  log.nominal_rate_ = 1.0 / median(std::move(dts));
  log.samples_ = std::move(samples);
  return log;
}

ImuLog parse_log(std::istream& in, const IngestConfig& config) {
  std::string line;
  std::size_t row = 0;
  std::vector<ImuSample> samples;
  bool header_seen = false;
  while (std::getline(in, line)) {
    ++row;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    const auto body = trim(line);
    if (body.empty()) continue;
    if (!header_seen) {
      header_seen = true;
      std::string compact;
      for (char c : body)
        if (c != ' ' && c != '\t') compact.push_back(c);
      if (compact != kHeader) throw ParseError(row, "expected header '" + std::string(kHeader) + "'");
      continue;
    }
    const auto cells = split(body, ',');
    if (cells.size() != 7)
      throw ParseError(row, "expected 7 columns, found " + std::to_string(cells.size()));
    double v[7];
    for (int c = 0; c < 7; ++c) {
      const auto cell = trim(cells[static_cast<std::size_t>(c)]);
      const auto res = std::from_chars(cell.data(), cell.data() + cell.size(), v[c]);
      if (res.ec != std::errc{} || res.ptr != cell.data() + cell.size())
        throw ParseError(row, "malformed number '" + std::string(cell) + "'");
      if (!std::isfinite(v[c])) throw ParseError(row, "non-finite value '" + std::string(cell) + "'");
    }
    if (!samples.empty() && !(v[0] > samples.back().t))
      throw OrderingError("row " + std::to_string(row) + ": timestamp not strictly increasing");
    samples.push_back({v[0], Vec3(v[1], v[2], v[3]), Vec3(v[4], v[5], v[6])});
  }
  if (!header_seen) throw ParseError(row, "empty file");
  return validate_gaps(make_log(std::move(samples)), config);
}

ImuLog parse_log(const std::filesystem::path& path, const IngestConfig& config) {
  std::ifstream in(path);
  if (!in) throw InputError("ingest", "cannot open " + path.string());
  return parse_log(in, config);
}

void write_log(std::ostream& out, const ImuLog& log) {
  std::string buf = std::string(kHeader) + "\n";
  for (const auto& s : log.samples()) {
    append_number(buf, s.t);
    for (int i = 0; i < 3; ++i) {
      buf.push_back(',');
      append_number(buf, s.f[i]);
    }
    for (int i = 0; i < 3; ++i) {
      buf.push_back(',');
      append_number(buf, s.w[i]);
    }
    buf.push_back('\n');
    if (buf.size() > (1u << 16)) {
      out << buf;
      buf.clear();
    }
  }
  out << buf;
}

void write_log(const std::filesystem::path& path, const ImuLog& log) {
  std::ofstream out(path);
  if (!out) throw InputError("io", "cannot write " + path.string());
  write_log(out, log);
}

// --- foreign layouts -------------------------------------------------------

ImportMapping ImportMapping::from_text(const std::string& text) {
  const auto kv = KeyValues::parse(text, "mapping");
  ImportMapping m;
  const auto delim = kv.text("delimiter", ",");
  if (delim == "tab" || delim == "\\t")
    m.delimiter = '\t';
  else if (delim == "space")
    m.delimiter = ' ';
  else if (delim.size() == 1)
    m.delimiter = delim[0];
  else
    throw InputError("import", "delimiter must be one character, 'tab' or 'space'");
  m.skip_rows = static_cast<std::size_t>(kv.integer("skip_rows", 0));
  m.header = kv.boolean("header", true);
  for (const char* key : {"t", "fx", "fy", "fz", "wx", "wy", "wz"}) {
    const auto col = kv.get(key);
    if (!col) throw InputError("import", std::string("mapping lacks column for '") + key + "'");
    m.columns[key] = *col;
  }
  m.time_scale = kv.number("time_scale", 1.0);
  m.accel_scale = kv.number("accel_scale", 1.0);
  m.gyro_scale = kv.number("gyro_scale", 1.0);
  m.rebase_time = kv.boolean("rebase_time", true);
  return m;
}

ImportMapping ImportMapping::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InputError("import", "cannot open mapping " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return from_text(ss.str());
}

ImuLog import_log(std::istream& in, const ImportMapping& mapping, const IngestConfig& config) {
  std::string line;
  std::size_t row = 0;
  auto next_line = [&]() -> bool {
    if (!std::getline(in, line)) return false;
    ++row;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    return true;
  };
  for (std::size_t i = 0; i < mapping.skip_rows; ++i)
    if (!next_line()) throw ParseError(row, "file ends inside skipped rows");

  static constexpr const char* kKeys[7] = {"t", "fx", "fy", "fz", "wx", "wy", "wz"};
  std::size_t index[7];
  if (mapping.header) {
    if (!next_line()) throw ParseError(row, "missing header");
    const auto names = split(line, mapping.delimiter);
    for (int k = 0; k < 7; ++k) {
      const auto& want = mapping.columns.at(kKeys[k]);
      const auto it = std::find_if(names.begin(), names.end(),
                                   [&](std::string_view n) { return trim(n) == want; });
      if (it == names.end()) throw ParseError(row, "header lacks column '" + want + "'");
      index[k] = static_cast<std::size_t>(it - names.begin());
    }
  } else {
    for (int k = 0; k < 7; ++k)
      index[k] = static_cast<std::size_t>(parse_number(mapping.columns.at(kKeys[k]), kKeys[k]));
  }

  std::vector<ImuSample> samples;
  double t0 = 0.0;
  while (next_line()) {
    if (trim(line).empty()) continue;
    const auto cells = mapping.delimiter == ' ' ? [&] {
      std::vector<std::string_view> out;
      for (auto c : split(line, ' '))
        if (!c.empty()) out.push_back(c);
      return out;
    }()
                                                : split(line, mapping.delimiter);
    double v[7];
    for (int k = 0; k < 7; ++k) {
      if (index[k] >= cells.size()) throw ParseError(row, "too few columns");
      const auto cell = trim(cells[index[k]]);
      const auto res = std::from_chars(cell.data(), cell.data() + cell.size(), v[k]);
      if (res.ec != std::errc{} || res.ptr != cell.data() + cell.size() || !std::isfinite(v[k]))
        throw ParseError(row, "bad value '" + std::string(cell) + "'");
    }
    double t = v[0] * mapping.time_scale;
    if (samples.empty()) t0 = mapping.rebase_time ? t : 0.0;
    t -= t0;
    if (!samples.empty() && !(t > samples.back().t))
      throw OrderingError("row " + std::to_string(row) + ": timestamp not strictly increasing");
    samples.push_back({t, Vec3(v[1], v[2], v[3]) * mapping.accel_scale,
                       Vec3(v[4], v[5], v[6]) * mapping.gyro_scale});
  }
  return validate_gaps(make_log(std::move(samples)), config);
}

ImuLog import_log(const std::filesystem::path& path, const ImportMapping& mapping,
                  const IngestConfig& config) {
  std::ifstream in(path);
  if (!in) throw InputError("import", "cannot open " + path.string());
  return import_log(in, mapping, config);
}

// --- rest intervals --------------------------------------------------------

RestIntervals detect_rest_intervals(const ImuLog& log, const ZuptDetector& detector,
                                    const IngestConfig& config) {
  const auto mask = compute_mask(log, detector);
  const std::size_t n = log.size();
  if (!mask[0]) throw ProtocolError("not a closed-protocol log: no rest at the start");
  if (!mask[n - 1]) throw ProtocolError("not a closed-protocol log: no rest at the end");

  std::size_t head_end = 0;
  while (head_end < n && mask[head_end]) ++head_end;
  if (head_end == n) throw ProtocolError("not a closed-protocol log: the whole log is at rest");
  std::size_t tail_begin = n;
  while (tail_begin > 0 && mask[tail_begin - 1]) --tail_begin;

  const double period = 1.0 / log.nominal_rate();
  const auto duration = [&](std::size_t count) { return static_cast<double>(count) * period; };
  // Small slack so exactly min_rest_duration worth of samples qualifies.
  const double min_duration = config.min_rest_duration - 1e-9;
  if (duration(head_end) < min_duration)
    throw ProtocolError("not a closed-protocol log: initial rest shorter than " +
                        std::to_string(config.min_rest_duration) + " s");
  if (duration(n - tail_begin) < min_duration)
    throw ProtocolError("not a closed-protocol log: final rest shorter than " +
                        std::to_string(config.min_rest_duration) + " s");
  return {{0, head_end}, {tail_begin, n}};
}

}  // namespace pdr
