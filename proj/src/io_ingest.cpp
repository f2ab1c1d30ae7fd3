#include "bitforensics/io_ingest.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include <fmt/format.h>
#include <json.hpp>

#include "bitforensics/errors.hpp"

namespace bitforensics {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::vector<std::string_view> split_ws(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && (line[i] == ' ' || line[i] == '\t' || line[i] == '\r')) ++i;
    std::size_t j = i;
    while (j < line.size() && line[j] != ' ' && line[j] != '\t' && line[j] != '\r') ++j;
    if (j > i) out.push_back(line.substr(i, j - i));
    i = j;
  }
  return out;
}

std::string_view strip_comment(std::string_view line) {
  auto pos = line.find('#');
  return pos == std::string_view::npos ? line : line.substr(0, pos);
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

/// Calls fn(line_number, line) for each line of text.
template <class Fn>
void for_each_line(std::string_view text, Fn&& fn) {
  std::size_t line_no = 0;
  std::size_t start = 0;
  while (start <= text.size()) {
    auto end = text.find('\n', start);
    if (end == std::string_view::npos) end = text.size();
    ++line_no;
    fn(line_no, text.substr(start, end - start));
    if (end == text.size()) break;
    start = end + 1;
  }
}

double parse_number(std::string_view token, std::size_t line, std::string_view field) {
  double value = 0.0;
  auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), value);
  if (ec != std::errc() || ptr != token.data() + token.size() || !std::isfinite(value)) {
    throw ParseError(line, fmt::format("malformed {} '{}'", field, token));
  }
  return value;
}

template <class ClassT>
Detection<ClassT> make_detection(std::string_view cls, double cx, double cy, double w, double h, double conf,
                                 std::size_t line) {
  auto in_unit = [](double v) { return v >= 0.0 && v <= 1.0; };
  if (!in_unit(cx)) throw ParseError(line, fmt::format("out-of-range cx {}", cx));
  if (!in_unit(cy)) throw ParseError(line, fmt::format("out-of-range cy {}", cy));
  if (!(w > 0.0 && w <= 1.0)) throw ParseError(line, fmt::format("out-of-range w {}", w));
  if (!(h > 0.0 && h <= 1.0)) throw ParseError(line, fmt::format("out-of-range h {}", h));
  if (!in_unit(conf)) throw ParseError(line, fmt::format("out-of-range confidence {}", conf));
  ClassT label{};
  try {
    label = parse_class<ClassT>(cls);
  } catch (const UnknownClassError& e) {
    throw ParseError(line, e.what());
  }
  return Detection<ClassT>{BoundingBox{cx, cy, w, h}, label, conf};
}

/// Line files are whitespace separated, so a location class is written in its
/// underscore spelling.
std::string line_code(LocationClass c) {
  return c == LocationClass::ShoulderRO ? std::string("Shoulder_RO") : std::string(code(c));
}
std::string line_code(DamageClass c) { return std::string(code(c)); }

ImageView parse_view(const json& img, const std::string& image_id) {
  const auto view = img.at("view").get<std::string>();
  if (view == "top") {
    if (img.contains("side_index") && !img["side_index"].is_null()) {
      throw ManifestError("image '" + image_id + "': top view must not carry side_index");
    }
    return ImageView::top();
  }
  if (view == "side") {
    int index = img.value("side_index", 1);
    if (index < 1) throw ManifestError("image '" + image_id + "': side_index must be >= 1");
    return ImageView::side(index);
  }
  throw ManifestError("image '" + image_id + "': view must be \"top\" or \"side\"");
}

fs::path resolve(const fs::path& base, const std::string& p) {
  fs::path path(p);
  if (path.is_relative() && !base.empty()) path = base / path;
  return path;
}

std::string relative_to(const fs::path& p, const fs::path& base) {
  if (base.empty()) return p.generic_string();
  auto rel = p.lexically_relative(base);
  if (rel.empty() || *rel.begin() == "..") return p.generic_string();
  return rel.generic_string();
}

}  // namespace

template <class ClassT>
std::vector<Detection<ClassT>> parse_detection_lines(std::string_view text, bool has_confidence) {
  std::vector<Detection<ClassT>> out;
  const std::size_t expected = has_confidence ? 6 : 5;
  for_each_line(text, [&](std::size_t line_no, std::string_view raw) {
    auto tokens = split_ws(strip_comment(raw));
    if (tokens.empty()) return;
    std::string cls(tokens.front());
    std::size_t first_number = 1;
    // "Shoulder RO" is the one class code containing a space.
    if constexpr (std::is_same_v<ClassT, LocationClass>) {
      if (tokens.size() == expected + 1 && tokens[0] == "Shoulder" && tokens[1] == "RO") {
        cls = "Shoulder RO";
        first_number = 2;
      }
    }
    if (tokens.size() - first_number != expected - 1) {
      throw ParseError(line_no, fmt::format("expected {} fields, found {}", expected, tokens.size() - first_number + 1));
    }
    double v[5] = {0, 0, 0, 0, 1.0};
    static constexpr std::string_view names[5] = {"cx", "cy", "w", "h", "confidence"};
    for (std::size_t k = 0; k + 1 < expected; ++k) v[k] = parse_number(tokens[first_number + k], line_no, names[k]);
    out.push_back(make_detection<ClassT>(cls, v[0], v[1], v[2], v[3], has_confidence ? v[4] : 1.0, line_no));
  });
  return out;
}

template <class ClassT>
std::string serialize_detection_lines(std::span<const Detection<ClassT>> detections, bool with_confidence) {
  std::string out;
  for (const auto& d : detections) {
    out += fmt::format("{} {:.6f} {:.6f} {:.6f} {:.6f}", line_code(d.label), d.box.cx, d.box.cy, d.box.w, d.box.h);
    if (with_confidence) out += fmt::format(" {:.6f}", d.confidence);
    out += '\n';
  }
  return out;
}

template <class ClassT>
std::vector<Detection<ClassT>> parse_detection_json(std::string_view text, bool has_confidence) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ParseError(1, e.what());
  }
  if (!doc.is_array()) throw ParseError(1, "detection JSON must be an array");
  std::vector<Detection<ClassT>> out;
  std::size_t item = 0;
  for (const auto& d : doc) {
    ++item;
    try {
      double conf = 1.0;
      if (has_confidence) {
        conf = d.at("conf").get<double>();
      } else if (d.contains("conf")) {
        throw ParseError(item, "unexpected confidence in ground truth");
      }
      out.push_back(make_detection<ClassT>(d.at("class").get<std::string>(), d.at("cx").get<double>(),
                                           d.at("cy").get<double>(), d.at("w").get<double>(),
                                           d.at("h").get<double>(), conf, item));
    } catch (const json::exception& e) {
      throw ParseError(item, e.what());
    }
  }
  return out;
}

template <class ClassT>
std::vector<Detection<ClassT>> read_detection_file(const fs::path& path, bool has_confidence) {
  auto text = read_text_file(path);
  try {
    if (path.extension() == ".json") return parse_detection_json<ClassT>(text, has_confidence);
    return parse_detection_lines<ClassT>(text, has_confidence);
  } catch (const ParseError& e) {
    throw e.with_file(path.string());
  }
}

#define BITFORENSICS_INSTANTIATE_IO(T)                                                              \
  template std::vector<Detection<T>> parse_detection_lines<T>(std::string_view, bool);              \
  template std::string serialize_detection_lines<T>(std::span<const Detection<T>>, bool);           \
  template std::vector<Detection<T>> parse_detection_json<T>(std::string_view, bool);               \
  template std::vector<Detection<T>> read_detection_file<T>(const fs::path&, bool);

BITFORENSICS_INSTANTIATE_IO(LocationClass)
BITFORENSICS_INSTANTIATE_IO(DamageClass)
#undef BITFORENSICS_INSTANTIATE_IO

BitManifest parse_manifest(std::string_view json_text, const fs::path& base_dir) {
  json doc;
  try {
    doc = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw ManifestError(std::string("manifest is not valid JSON: ") + e.what());
  }
  BitManifest m;
  try {
    m.bit_id = doc.at("bit_id").get<std::string>();
    m.num_main_blades = doc.value("num_main_blades", kDefaultMainBlades);
    if (m.bit_id.empty()) throw ManifestError("bit_id must be nonempty");
    if (m.num_main_blades < 1) throw ManifestError("num_main_blades must be positive");
    std::set<std::string> seen;
    int top_views = 0;
    for (const auto& img : doc.at("images")) {
      ManifestEntry e;
      e.image_id = img.at("image_id").get<std::string>();
      if (e.image_id.empty()) throw ManifestError("image_id must be nonempty");
      if (!seen.insert(e.image_id).second) throw ManifestError("duplicate image_id '" + e.image_id + "'");
      e.view = parse_view(img, e.image_id);
      if (e.view.kind == ViewKind::Top && ++top_views > 1) throw ManifestError("more than one top view");
      e.location_file = resolve(base_dir, img.at("location_file").get<std::string>());
      e.damage_file = resolve(base_dir, img.at("damage_file").get<std::string>());
      if (img.contains("gt_location_file") && !img["gt_location_file"].is_null()) {
        e.gt_location_file = resolve(base_dir, img["gt_location_file"].get<std::string>());
      }
      if (img.contains("gt_damage_file") && !img["gt_damage_file"].is_null()) {
        e.gt_damage_file = resolve(base_dir, img["gt_damage_file"].get<std::string>());
      }
      m.entries.push_back(std::move(e));
    }
  } catch (const json::exception& e) {
    throw ManifestError(std::string("manifest schema: ") + e.what());
  }
  return m;
}

BitManifest load_manifest(const fs::path& path) {
  auto text = read_text_file(path);
  try {
    return parse_manifest(text, path.parent_path());
  } catch (const ManifestError& e) {
    throw ManifestError(path.string() + ": " + e.what());
  }
}

std::string manifest_to_json(const BitManifest& manifest, const fs::path& base_dir) {
  json images = json::array();
  for (const auto& e : manifest.entries) {
    json img;
    img["image_id"] = e.image_id;
    img["view"] = e.view.kind == ViewKind::Top ? "top" : "side";
    if (e.view.kind == ViewKind::Side) img["side_index"] = e.view.side_index;
    img["location_file"] = relative_to(e.location_file, base_dir);
    img["damage_file"] = relative_to(e.damage_file, base_dir);
    if (e.gt_location_file) img["gt_location_file"] = relative_to(*e.gt_location_file, base_dir);
    if (e.gt_damage_file) img["gt_damage_file"] = relative_to(*e.gt_damage_file, base_dir);
    images.push_back(std::move(img));
  }
  json doc;
  doc["bit_id"] = manifest.bit_id;
  doc["num_main_blades"] = manifest.num_main_blades;
  doc["images"] = std::move(images);
  return doc.dump(2) + "\n";
}

BitDetections load_bit(const BitManifest& manifest) {
  BitDetections bit;
  bit.bit_id = manifest.bit_id;
  bit.num_main_blades = manifest.num_main_blades;
  std::set<std::string> seen;
  for (const auto& e : manifest.entries) {
    if (!seen.insert(e.image_id).second) throw ManifestError("duplicate image_id '" + e.image_id + "'");
    bit.location_images.push_back({e.image_id, e.view, read_detection_file<LocationClass>(e.location_file, true)});
    bit.damage_images.push_back({e.image_id, e.view, read_detection_file<DamageClass>(e.damage_file, true)});
    LocationImage gt_loc{e.image_id, e.view, {}};
    DamageImage gt_dmg{e.image_id, e.view, {}};
    if (e.gt_location_file && fs::exists(*e.gt_location_file)) {
      gt_loc.detections = read_detection_file<LocationClass>(*e.gt_location_file, false);
    }
    if (e.gt_damage_file && fs::exists(*e.gt_damage_file)) {
      gt_dmg.detections = read_detection_file<DamageClass>(*e.gt_damage_file, false);
    }
    bit.gt_location_images.push_back(std::move(gt_loc));
    bit.gt_damage_images.push_back(std::move(gt_dmg));
  }
  return bit;
}

std::vector<BitManifest> load_dataset(const fs::path& dir) {
  if (!fs::is_directory(dir)) throw IoError(dir.string(), "not a directory");
  std::vector<fs::path> files;
  for (const auto& entry : fs::directory_iterator(dir)) {
    if (entry.is_regular_file() && entry.path().extension() == ".json") files.push_back(entry.path());
  }
  std::sort(files.begin(), files.end());
  std::vector<BitManifest> out;
  out.reserve(files.size());
  for (const auto& f : files) out.push_back(load_manifest(f));
  return out;
}

std::vector<CauseLabelRecord> parse_cause_labels(std::string_view text) {
  std::vector<CauseLabelRecord> out;
  bool header_seen = false;
  for_each_line(text, [&](std::size_t line_no, std::string_view raw) {
    auto line = trim(raw);
    if (line.empty() || line.front() == '#') return;
    if (!header_seen) {
      if (line != kCauseCsvHeader) throw ParseError(line_no, fmt::format("expected header '{}'", kCauseCsvHeader));
      header_seen = true;
      return;
    }
    std::vector<std::string_view> cells;
    std::size_t start = 0;
    while (true) {
      auto comma = line.find(',', start);
      cells.push_back(trim(line.substr(start, comma == std::string_view::npos ? line.npos : comma - start)));
      if (comma == std::string_view::npos) break;
      start = comma + 1;
    }
    if (cells.size() != kCauseCount + 1) {
      throw ParseError(line_no, fmt::format("expected {} cells, found {}", kCauseCount + 1, cells.size()));
    }
    CauseLabelRecord rec;
    rec.bit_id = std::string(cells[0]);
    if (rec.bit_id.empty()) throw ParseError(line_no, "empty bit_id");
    for (std::size_t i = 0; i < kCauseCount; ++i) {
      auto cell = cells[i + 1];
      if (cell == "1") {
        rec.causes.insert(kAllCauses[i]);
      } else if (cell != "0") {
        throw ParseError(line_no, fmt::format("non-binary cell '{}' in column {}", cell, code(kAllCauses[i])));
      }
    }
    if (rec.causes.contains(FailureCause::Green) && rec.causes.size() > 1) {
      throw GreenConflictError(fmt::format("line {}: bit '{}' is green and has other causes", line_no, rec.bit_id));
    }
    out.push_back(std::move(rec));
  });
  if (!header_seen) throw ParseError(1, "missing header");
  return out;
}

std::string serialize_cause_labels(std::span<const CauseLabelRecord> records) {
  std::string out(kCauseCsvHeader);
  out += '\n';
  for (const auto& r : records) {
    out += r.bit_id;
    for (auto c : kAllCauses) out += r.causes.contains(c) ? ",1" : ",0";
    out += '\n';
  }
  return out;
}

std::string read_text_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError(path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text_file(const fs::path& path, std::string_view text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError(path.string(), "cannot write");
  out.write(text.data(), static_cast<std::streamsize>(text.size()));
}

}  // namespace bitforensics
