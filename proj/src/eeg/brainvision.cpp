#include "wcstlab/eeg/brainvision.hpp"

#include <algorithm>
#include <bit>
#include <charconv>
#include <cmath>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <map>
#include <numbers>
#include <sstream>

#include <fmt/format.h>

#include "wcstlab/errors.hpp"

namespace wcst::eeg {

namespace {

struct IniValue {
  std::string value;
  int line = 0;
};

struct IniSection {
  int line = 0;
  std::map<std::string, IniValue> entries;
};

struct IniDocument {
  std::string name;
  std::string identification;
  std::map<std::string, IniSection> sections;

  const IniSection& section(const std::string& s) const {
    auto it = sections.find(s);
    if (it == sections.end()) throw ParseError(name, s, 0, "missing section");
    return it->second;
  }

  const IniValue& require(const std::string& s, const std::string& key) const {
    const auto& sec = section(s);
    auto it = sec.entries.find(key);
    if (it == sec.entries.end()) throw ParseError(name, s, sec.line, "missing required key '" + key + "'");
    return it->second;
  }
};

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

IniDocument parse_ini(std::string_view text, const std::string& name) {
  IniDocument doc;
  doc.name = name;
  std::string current;
  int line_no = 0;
  std::size_t pos = 0;
  std::vector<std::string_view> lines;
  while (pos < text.size()) {
    const auto end = std::min(text.find('\n', pos), text.size());
    lines.push_back(text.substr(pos, end - pos));
    pos = end + 1;
  }
  for (auto raw : lines) {
    auto line = trim(raw);
    ++line_no;
    if (line_no == 1) {
      // Strip a UTF-8 BOM.
      if (line.substr(0, 3) == "\xEF\xBB\xBF") line.remove_prefix(3);
      doc.identification = std::string(line);
      continue;
    }
    if (line.empty() || line.front() == ';') continue;
    if (line.front() == '[') {
      const auto close = line.find(']');
      if (close == std::string_view::npos) throw ParseError(name, current, line_no, "unterminated section header");
      current = std::string(line.substr(1, close - 1));
      doc.sections[current].line = line_no;
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) throw ParseError(name, current, line_no, "expected key=value");
    if (current.empty()) throw ParseError(name, current, line_no, "key outside of any section");
    doc.sections[current].entries[std::string(trim(line.substr(0, eq)))] =
        IniValue{std::string(line.substr(eq + 1)), line_no};
  }
  return doc;
}

std::vector<std::string> split_fields(const std::string& v) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : v) {
    if (c == ',') {
      out.push_back(cur);
      cur.clear();
    } else {
      cur += c;
    }
  }
  out.push_back(cur);
  return out;
}

std::string unescape(const std::string& s) {
  std::string out;
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (s[i] == '\\' && i + 1 < s.size() && s[i + 1] == '1') {
      out += ',';
      ++i;
    } else {
      out += s[i];
    }
  }
  return out;
}

std::string escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    if (c == ',') {
      out += "\\1";
    } else {
      out += c;
    }
  }
  return out;
}

double parse_number(const IniDocument& doc, const std::string& section, const IniValue& v, const std::string& what) {
  double out = 0.0;
  const auto s = trim(v.value);
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
  if (ec != std::errc() || ptr != s.data() + s.size()) {
    throw ParseError(doc.name, section, v.line, fmt::format("{} is not a number: '{}'", what, v.value));
  }
  return out;
}

long long parse_integer(const IniDocument& doc, const std::string& section, const IniValue& v, const std::string& what) {
  long long out = 0;
  const auto s = trim(v.value);
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
  if (ec != std::errc() || ptr != s.data() + s.size()) {
    throw ParseError(doc.name, section, v.line, fmt::format("{} is not an integer: '{}'", what, v.value));
  }
  return out;
}

void expect_value(const IniDocument& doc, const std::string& section, const std::string& key,
                  std::string_view expected, std::string_view hint = {}) {
  const auto& v = doc.require(section, key);
  if (trim(v.value) != expected) {
    throw ParseError(doc.name, section, v.line,
                     fmt::format("unsupported {}={} (only {} is supported{}{})", key, v.value, expected,
                                 hint.empty() ? "" : "; ", hint));
  }
}

float load_float_le(const std::uint8_t* p) {
  std::uint32_t bits = 0;
  std::memcpy(&bits, p, 4);
  if constexpr (std::endian::native == std::endian::big) bits = __builtin_bswap32(bits);
  return std::bit_cast<float>(bits);
}

void store_float_le(float v, std::uint8_t* p) {
  auto bits = std::bit_cast<std::uint32_t>(v);
  if constexpr (std::endian::native == std::endian::big) bits = __builtin_bswap32(bits);
  std::memcpy(p, &bits, 4);
}

std::string read_all(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) throw InputError("cannot open " + p.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_all(const std::filesystem::path& p, std::string_view data) {
  std::ofstream out(p, std::ios::binary);
  if (!out) throw InputError("cannot write " + p.string());
  out.write(data.data(), static_cast<std::streamsize>(data.size()));
}

// Position -> BESA-style (theta, phi) with phi kept in [-90, 90].
std::pair<double, double> position_to_spherical(const Position& p) {
  const double norm = std::sqrt(p.x * p.x + p.y * p.y + p.z * p.z);
  double theta = std::acos(std::clamp(p.z / norm, -1.0, 1.0)) * 180.0 / std::numbers::pi;
  double phi = std::atan2(p.y, p.x) * 180.0 / std::numbers::pi;
  if (phi > 90.0) {
    theta = -theta;
    phi -= 180.0;
  } else if (phi < -90.0) {
    theta = -theta;
    phi += 180.0;
  }
  return {theta, phi};
}

}  // namespace

Recording read_brainvision(std::string_view header, std::string_view markers, std::span<const std::uint8_t> payload,
                           const BrainVisionReadOptions& options) {
  const auto hdr = parse_ini(header, options.header_name);
  if (hdr.identification.find("Data Exchange Header File") == std::string::npos) {
    throw ParseError(hdr.name, "", 1, "not a BrainVision header (identification line missing)");
  }
  const std::string common = "Common Infos";
  const std::string binary = "Binary Infos";
  const std::string chans = "Channel Infos";

  expect_value(hdr, common, "DataFormat", "BINARY");
  expect_value(hdr, common, "DataOrientation", "MULTIPLEXED");
  const auto& n_ch_v = hdr.require(common, "NumberOfChannels");
  const auto n_ch = parse_integer(hdr, common, n_ch_v, "NumberOfChannels");
  if (n_ch < 1) throw ParseError(hdr.name, common, n_ch_v.line, "NumberOfChannels must be >= 1");
  const auto& interval_v = hdr.require(common, "SamplingInterval");
  const double interval_us = parse_number(hdr, common, interval_v, "SamplingInterval");
  if (!(interval_us > 0.0)) throw ParseError(hdr.name, common, interval_v.line, "SamplingInterval must be > 0");
  expect_value(hdr, binary, "BinaryFormat", "IEEE_FLOAT_32",
               "INT_16 data must be converted to IEEE_FLOAT_32 before import");

  std::vector<ChannelInfo> channels;
  std::vector<double> resolutions;
  for (long long c = 1; c <= n_ch; ++c) {
    const auto& v = hdr.require(chans, fmt::format("Ch{}", c));
    const auto fields = split_fields(v.value);
    ChannelInfo info;
    info.name = unescape(fields[0]);
    if (info.name.empty()) throw ParseError(hdr.name, chans, v.line, "empty channel name");
    info.resolution = 1.0;
    if (fields.size() > 2 && !trim(fields[2]).empty()) {
      info.resolution = parse_number(hdr, chans, IniValue{fields[2], v.line}, "channel resolution");
    }
    if (fields.size() > 3) info.unit = std::string(trim(fields[3]));
    channels.push_back(std::move(info));
  }
  if (auto it = hdr.sections.find("Coordinates"); it != hdr.sections.end()) {
    for (long long c = 1; c <= n_ch; ++c) {
      auto e = it->second.entries.find(fmt::format("Ch{}", c));
      if (e == it->second.entries.end()) continue;
      const auto f = split_fields(e->second.value);
      if (f.size() != 3) throw ParseError(hdr.name, "Coordinates", e->second.line, "expected r,theta,phi");
      const double r = parse_number(hdr, "Coordinates", IniValue{f[0], e->second.line}, "radius");
      const double th = parse_number(hdr, "Coordinates", IniValue{f[1], e->second.line}, "theta");
      const double ph = parse_number(hdr, "Coordinates", IniValue{f[2], e->second.line}, "phi");
      if (r > 0.0) channels[c - 1].position = spherical_to_position(th, ph);
    }
  }
  channels = assign_roles(std::move(channels), options.eog_labels);

  const std::size_t frame = static_cast<std::size_t>(n_ch) * 4;
  std::size_t n_samples = payload.size() / frame;
  if (auto it = hdr.sections.at(common).entries.find("DataPoints"); it != hdr.sections.at(common).entries.end()) {
    const auto points = parse_integer(hdr, common, it->second, "DataPoints");
    const auto expected = static_cast<std::size_t>(points) * frame;
    if (payload.size() != expected) {
      throw ParseError(options.data_name, "", 0,
                       fmt::format("binary payload has {} bytes, expected {} ({} channels x {} samples x 4)",
                                   payload.size(), expected, n_ch, points));
    }
    n_samples = static_cast<std::size_t>(points);
  } else if (payload.size() % frame != 0) {
    throw ParseError(options.data_name, "", 0,
                     fmt::format("binary payload has {} bytes, expected a multiple of {} ({} channels x 4); "
                                 "nearest complete size is {}",
                                 payload.size(), frame, n_ch, (n_samples + 1) * frame));
  }

  Matrix data(n_ch, static_cast<Eigen::Index>(n_samples));
  const auto* p = payload.data();
  for (std::size_t s = 0; s < n_samples; ++s) {
    for (long long c = 0; c < n_ch; ++c, p += 4) {
      data(c, static_cast<Eigen::Index>(s)) = static_cast<double>(load_float_le(p)) * channels[c].resolution;
    }
  }

  std::vector<Marker> marks;
  const auto mrk = parse_ini(markers, options.marker_name);
  if (mrk.identification.find("Data Exchange Marker File") == std::string::npos) {
    throw ParseError(mrk.name, "", 1, "not a BrainVision marker file (identification line missing)");
  }
  if (auto it = mrk.sections.find("Marker Infos"); it != mrk.sections.end()) {
    std::vector<std::pair<long long, const IniValue*>> entries;
    for (const auto& [key, v] : it->second.entries) {
      if (key.size() < 3 || key.compare(0, 2, "Mk") != 0) {
        throw ParseError(mrk.name, "Marker Infos", v.line, "unexpected key '" + key + "'");
      }
      entries.emplace_back(parse_integer(mrk, "Marker Infos", IniValue{key.substr(2), v.line}, "marker number"), &v);
    }
    std::sort(entries.begin(), entries.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
    for (const auto& [num, v] : entries) {
      const auto f = split_fields(v->value);
      if (f.size() < 5) throw ParseError(mrk.name, "Marker Infos", v->line, "expected type,label,position,size,channel");
      const auto position = parse_integer(mrk, "Marker Infos", IniValue{f[2], v->line}, "marker position");
      if (position < 1 || position > static_cast<long long>(n_samples)) {
        throw ParseError(mrk.name, "Marker Infos", v->line,
                         fmt::format("marker position {} outside [1, {}]", position, n_samples));
      }
      marks.push_back(Marker{position - 1, unescape(f[1]), unescape(f[0])});
    }
  }

  return Recording(1e6 / interval_us, std::move(channels), std::move(data), std::move(marks));
}

BrainVisionFiles write_brainvision(const Recording& rec, std::string_view basename) {
  BrainVisionFiles out;
  const auto n_ch = rec.n_channels();
  const auto n = rec.n_samples();

  std::string h;
  h += "Brain Vision Data Exchange Header File Version 1.0\n";
  h += "; Data written by wcstlab\n\n";
  h += "[Common Infos]\nCodepage=UTF-8\n";
  h += fmt::format("DataFile={}.eeg\nMarkerFile={}.vmrk\n", basename, basename);
  h += "DataFormat=BINARY\n";
  h += "; Data orientation: MULTIPLEXED=ch1,pt1, ch2,pt1 ...\nDataOrientation=MULTIPLEXED\n";
  h += fmt::format("NumberOfChannels={}\nDataPoints={}\n", n_ch, n);
  h += fmt::format("; Sampling interval in microseconds\nSamplingInterval={}\n\n", 1e6 / rec.fs());
  h += "[Binary Infos]\nBinaryFormat=IEEE_FLOAT_32\n\n";
  h += "[Channel Infos]\n; Ch<n>=<Name>,<Reference channel name>,<Resolution in Unit>,<Unit>\n";
  bool any_position = false;
  for (Eigen::Index c = 0; c < n_ch; ++c) {
    const auto& info = rec.channels()[c];
    h += fmt::format("Ch{}={},,{},{}\n", c + 1, escape(info.name), info.resolution, info.unit);
    any_position |= info.position.has_value();
  }
  if (any_position) {
    h += "\n[Coordinates]\n";
    for (Eigen::Index c = 0; c < n_ch; ++c) {
      const auto& pos = rec.channels()[c].position;
      if (!pos) {
        h += fmt::format("Ch{}=0,0,0\n", c + 1);
        continue;
      }
      const auto [th, ph] = position_to_spherical(*pos);
      h += fmt::format("Ch{}=1,{:.10g},{:.10g}\n", c + 1, th, ph);
    }
  }
  out.header = std::move(h);

  std::string m;
  m += "Brain Vision Data Exchange Marker File, Version 1.0\n\n";
  m += fmt::format("[Common Infos]\nCodepage=UTF-8\nDataFile={}.eeg\n\n", basename);
  m += "[Marker Infos]\n; Mk<n>=<Type>,<Description>,<Position in data points>,<Size in data points>,"
       "<Channel number (0 = marker is related to all channels)>\n";
  for (std::size_t i = 0; i < rec.markers().size(); ++i) {
    const auto& mk = rec.markers()[i];
    m += fmt::format("Mk{}={},{},{},1,0\n", i + 1, escape(mk.type), escape(mk.label), mk.sample + 1);
  }
  out.markers = std::move(m);

  out.payload.resize(static_cast<std::size_t>(n_ch * n) * 4);
  auto* p = out.payload.data();
  for (Eigen::Index s = 0; s < n; ++s) {
    for (Eigen::Index c = 0; c < n_ch; ++c, p += 4) {
      store_float_le(static_cast<float>(rec.data()(c, s) / rec.channels()[c].resolution), p);
    }
  }
  return out;
}

Recording read_brainvision_file(const std::string& vhdr_path, std::vector<std::string> eog_labels) {
  namespace fs = std::filesystem;
  const fs::path hp(vhdr_path);
  const auto header = read_all(hp);
  const auto doc = parse_ini(header, hp.string());
  const auto dir = hp.parent_path();
  const auto data_name = std::string(trim(doc.require("Common Infos", "DataFile").value));
  const auto marker_name = std::string(trim(doc.require("Common Infos", "MarkerFile").value));
  const auto data = read_all(dir / data_name);
  const auto markers = read_all(dir / marker_name);
  BrainVisionReadOptions opts;
  opts.eog_labels = std::move(eog_labels);
  opts.header_name = hp.string();
  opts.marker_name = (dir / marker_name).string();
  opts.data_name = (dir / data_name).string();
  return read_brainvision(header, markers,
                          std::span(reinterpret_cast<const std::uint8_t*>(data.data()), data.size()), opts);
}

void write_brainvision_file(const Recording& rec, const std::string& vhdr_path) {
  namespace fs = std::filesystem;
  const fs::path hp(vhdr_path);
  const auto base = hp.stem().string();
  const auto files = write_brainvision(rec, base);
  const auto dir = hp.parent_path();
  write_all(hp, files.header);
  write_all(dir / (base + ".vmrk"), files.markers);
  write_all(dir / (base + ".eeg"),
            std::string_view(reinterpret_cast<const char*>(files.payload.data()), files.payload.size()));
}

}  // namespace wcst::eeg
