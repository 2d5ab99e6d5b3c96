#include "spma/report.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>

#include <json.hpp>

namespace spma {

namespace {

namespace fs = std::filesystem;
using nlohmann::json;

// Locale-independent, round-trip-exact double formatting; the CSV contract
// pins '.' as the decimal separator.
std::string fmt_double(double x) {
  char buf[40];
  const auto res = std::to_chars(buf, buf + sizeof buf, x,
                                 std::chars_format::general, 17);
  return std::string(buf, res.ptr);
}

double parse_double(const std::string& field) {
  double value = 0.0;
  const auto res = std::from_chars(field.data(), field.data() + field.size(), value);
  if (res.ec != std::errc() || res.ptr != field.data() + field.size())
    throw IoError("malformed numeric field '" + field + "'");
  return value;
}

std::string opt_field(const std::optional<double>& v) {
  return v ? fmt_double(*v) : std::string();
}

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> out;
  std::string field;
  for (char c : line) {
    if (c == ',') {
      out.push_back(field);
      field.clear();
    } else {
      field.push_back(c);
    }
  }
  out.push_back(field);
  return out;
}

std::string cell_filename(const CellSpec& spec) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "cell%03d_%s.csv", spec.index, method_name(spec.method));
  return buf;
}

void write_file(const fs::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write '" + path.string() + "'");
  out << content;
  if (!out) throw IoError("write failed for '" + path.string() + "'");
}

}  // namespace

std::string record_csv_header() {
  return "t,j_value,subopt_inf,subopt_rho,c_t,min_gap,alpha_t,surrogate_final,"
         "surrogate_gap,bound_ok";
}

std::string record_to_csv(const IterationRecord& rec) {
  std::string line = std::to_string(rec.t);
  line += ',' + fmt_double(rec.j_value);
  line += ',' + fmt_double(rec.subopt_inf);
  line += ',' + fmt_double(rec.subopt_rho);
  line += ',' + opt_field(rec.c_t);
  line += ',' + opt_field(rec.min_gap);
  line += ',' + fmt_double(rec.alpha_t);
  line += ',' + opt_field(rec.surrogate_final);
  line += ',' + opt_field(rec.surrogate_gap);
  line += ',';
  if (rec.bound_ok) line += *rec.bound_ok ? "1" : "0";
  return line;
}

IterationRecord record_from_csv(const std::string& line) {
  const auto fields = split_csv(line);
  if (fields.size() != 10) throw IoError("malformed record line: " + line);
  IterationRecord rec;
  rec.t = std::stoi(fields[0]);
  rec.j_value = parse_double(fields[1]);
  rec.subopt_inf = parse_double(fields[2]);
  rec.subopt_rho = parse_double(fields[3]);
  if (!fields[4].empty()) rec.c_t = parse_double(fields[4]);
  if (!fields[5].empty()) rec.min_gap = parse_double(fields[5]);
  rec.alpha_t = parse_double(fields[6]);
  if (!fields[7].empty()) rec.surrogate_final = parse_double(fields[7]);
  if (!fields[8].empty()) rec.surrogate_gap = parse_double(fields[8]);
  if (!fields[9].empty()) rec.bound_ok = fields[9] == "1";
  return rec;
}

void write_results(const ExperimentResult& result, const std::string& out_dir,
                   bool with_svg) {
  const fs::path dir(out_dir);
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw IoError("cannot create output directory '" + out_dir + "'");

  json manifest;
  manifest["cells"] = json::array();
  for (const auto& cell : result.cells) {
    json entry;
    entry["index"] = cell.spec.index;
    entry["method"] = method_name(cell.spec.method);
    entry["eta_raw"] = cell.spec.eta_raw;
    entry["eta_effective"] = cell.spec.eta_effective;
    entry["inner_m"] = cell.spec.inner_m;
    entry["seed"] = cell.spec.seed;
    entry["file"] = cell_filename(cell.spec);
    entry["error"] = cell.error;
    manifest["cells"].push_back(entry);

    std::string body = record_csv_header();
    body += '\n';
    for (const auto& rec : cell.records) {
      body += record_to_csv(rec);
      body += '\n';
    }
    write_file(dir / cell_filename(cell.spec), body);
  }
  write_file(dir / "manifest.json", manifest.dump(2) + "\n");
  write_file(dir / "summary.md", render_markdown(result));
  if (with_svg) write_file(dir / "curves.svg", render_svg(result));
}

ExperimentResult read_results(const std::string& dir_in) {
  const fs::path dir(dir_in);
  std::ifstream manifest_in(dir / "manifest.json");
  if (!manifest_in) throw IoError("no manifest.json in '" + dir_in + "'");
  json manifest;
  try {
    manifest_in >> manifest;
  } catch (const json::exception& e) {
    throw IoError(std::string("malformed manifest: ") + e.what());
  }

  ExperimentResult result;
  for (const auto& entry : manifest.at("cells")) {
    CellResult cell;
    cell.spec.index = entry.at("index").get<int>();
    cell.spec.method = parse_method(entry.at("method").get<std::string>());
    cell.spec.eta_raw = entry.at("eta_raw").get<double>();
    cell.spec.eta_effective = entry.at("eta_effective").get<double>();
    cell.spec.inner_m = entry.at("inner_m").get<int>();
    cell.spec.seed = entry.at("seed").get<std::uint64_t>();
    cell.error = entry.at("error").get<std::string>();

    std::ifstream in(dir / entry.at("file").get<std::string>());
    if (!in) throw IoError("missing cell file " + entry.at("file").get<std::string>());
    std::string line;
    std::getline(in, line);
    if (line != record_csv_header()) throw IoError("unexpected CSV header: " + line);
    while (std::getline(in, line)) {
      if (!line.empty()) cell.records.push_back(record_from_csv(line));
    }
    cell.auc = curve_auc(cell.records);
    result.cells.push_back(std::move(cell));
  }
  return result;
}

std::string render_markdown(const ExperimentResult& result) {
  std::ostringstream md;
  md.imbue(std::locale::classic());
  md << "# Experiment summary\n\n";

  int failed = 0;
  for (const auto& cell : result.cells)
    if (cell.failed()) ++failed;
  md << result.cells.size() << " cells";
  if (failed > 0) md << " (" << failed << " failed)";
  md << "\n\n## Best step size by AUC\n\n";
  md << "| method | m | eta | mean AUC | std err |\n";
  md << "|---|---|---|---|---|\n";
  for (const auto& [key, s] : best_eta(result)) {
    md << "| " << key.first << " | " << key.second << " | " << s.eta_raw << " | "
       << s.mean_auc << " | " << s.std_error << " |\n";
  }

  md << "\n## Final iterates\n\n";
  md << "| method | eta | m | seed | final J | final subopt (rho) | prod alpha_t | bounds |\n";
  md << "|---|---|---|---|---|---|---|---|\n";
  for (const auto& cell : result.cells) {
    md << "| " << method_name(cell.spec.method) << " | " << cell.spec.eta_raw << " | "
       << cell.spec.inner_m << " | " << cell.spec.seed << " | ";
    if (cell.failed()) {
      md << "error: " << cell.error << " | | | |\n";
      continue;
    }
    const auto& last = cell.records.back();
    double alpha_prod = 1.0;
    bool any_bound = false;
    bool all_ok = true;
    for (const auto& rec : cell.records) {
      alpha_prod *= rec.alpha_t;
      if (rec.bound_ok) {
        any_bound = true;
        all_ok = all_ok && *rec.bound_ok;
      }
    }
    md << last.j_value << " | " << last.subopt_rho << " | " << alpha_prod << " | "
       << (any_bound ? (all_ok ? "ok" : "VIOLATED") : "-") << " |\n";
  }
  md << "\n";
  return md.str();
}

std::string render_svg(const ExperimentResult& result) {
  // One polyline per method at its best eta (first seed, largest m).
  const int width = 640, height = 400, margin = 48;
  const char* colors[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e"};

  struct Curve {
    std::string label;
    const std::vector<IterationRecord>* records;
    const char* color;
  };
  std::vector<Curve> curves;
  const auto best = best_eta(result);
  int color_idx = 0;
  for (const auto& [key, summary] : best) {
    const CellResult* chosen = nullptr;
    for (const auto& cell : result.cells) {
      if (cell.failed()) continue;
      if (method_name(cell.spec.method) == key.first && cell.spec.inner_m == key.second &&
          cell.spec.eta_raw == summary.eta_raw) {
        chosen = &cell;
        break;
      }
    }
    if (!chosen || chosen->records.empty()) continue;
    std::ostringstream label;
    label.imbue(std::locale::classic());
    label << key.first;
    if (key.second > 0) label << " m=" << key.second;
    label << " eta=" << summary.eta_raw;
    curves.push_back({label.str(), &chosen->records,
                      colors[color_idx++ % (sizeof colors / sizeof colors[0])]});
  }

  double j_lo = 0.0, j_hi = 1.0;
  std::size_t t_max = 1;
  bool first = true;
  for (const auto& c : curves) {
    for (const auto& rec : *c.records) {
      if (first) {
        j_lo = j_hi = rec.j_value;
        first = false;
      }
      j_lo = std::min(j_lo, rec.j_value);
      j_hi = std::max(j_hi, rec.j_value);
    }
    t_max = std::max(t_max, c.records->size() - 1);
  }
  if (j_hi <= j_lo) j_hi = j_lo + 1.0;

  auto x_of = [&](double t) {
    return margin + t / static_cast<double>(t_max) * (width - 2 * margin);
  };
  auto y_of = [&](double j) {
    return height - margin - (j - j_lo) / (j_hi - j_lo) * (height - 2 * margin);
  };

  std::ostringstream svg;
  svg.imbue(std::locale::classic());
  svg << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
  svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\""
      << height << "\" viewBox=\"0 0 " << width << " " << height << "\">\n";
  svg << "  <rect width=\"" << width << "\" height=\"" << height << "\" fill=\"white\"/>\n";
  svg << "  <line x1=\"" << margin << "\" y1=\"" << height - margin << "\" x2=\""
      << width - margin << "\" y2=\"" << height - margin
      << "\" stroke=\"black\" stroke-width=\"1\"/>\n";
  svg << "  <line x1=\"" << margin << "\" y1=\"" << margin << "\" x2=\"" << margin
      << "\" y2=\"" << height - margin << "\" stroke=\"black\" stroke-width=\"1\"/>\n";
  svg << "  <text x=\"" << width / 2 << "\" y=\"" << height - 10
      << "\" font-size=\"12\" text-anchor=\"middle\">iteration</text>\n";
  svg << "  <text x=\"14\" y=\"" << height / 2
      << "\" font-size=\"12\" text-anchor=\"middle\" transform=\"rotate(-90 14 "
      << height / 2 << ")\">expected return</text>\n";

  int legend_y = margin;
  for (const auto& c : curves) {
    svg << "  <polyline fill=\"none\" stroke=\"" << c.color << "\" stroke-width=\"1.5\" points=\"";
    for (std::size_t t = 0; t < c.records->size(); ++t) {
      if (t) svg << ' ';
      svg << x_of(static_cast<double>(t)) << ',' << y_of((*c.records)[t].j_value);
    }
    svg << "\"/>\n";
    svg << "  <text x=\"" << width - margin - 4 << "\" y=\"" << legend_y
        << "\" font-size=\"11\" text-anchor=\"end\" fill=\"" << c.color << "\">" << c.label
        << "</text>\n";
    legend_y += 14;
  }
  svg << "</svg>\n";
  return svg.str();
}

}  // namespace spma
