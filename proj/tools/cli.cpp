#include "cli.hpp"

#include <algorithm>
#include <chrono>
#include <cstdlib>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "xpowx/csv.hpp"
#include "xpowx/error.hpp"
#include "xpowx/fhstats.hpp"
#include "xpowx/linforms.hpp"
#include "xpowx/multind.hpp"
#include "xpowx/nset.hpp"
#include "xpowx/psimap.hpp"

namespace xpowx::cli {

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;

fs::path cache_root() {
  if (const char* dir = std::getenv("XPOWX_CACHE_DIR"); dir && *dir) return dir;
  if (const char* xdg = std::getenv("XDG_CACHE_HOME"); xdg && *xdg) return fs::path(xdg) / "xpowx";
  if (const char* home = std::getenv("HOME"); home && *home) return fs::path(home) / ".cache" / "xpowx";
  return fs::temp_directory_path() / "xpowx";
}

namespace {

class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Append-only key/value store, one JSON object per line.
class Cache {
 public:
  Cache(bool enabled, std::ostream& err) : err_(err) {
    if (!enabled) return;
    std::error_code ec;
    fs::create_directories(cache_root(), ec);
    if (ec) {
      err_ << "warning: cache disabled, cannot create " << cache_root() << ": " << ec.message() << '\n';
      return;
    }
    path_ = cache_root() / "cache.jsonl";
    std::ifstream in(path_);
    std::string line;
    while (std::getline(in, line)) {
      auto entry = json::parse(line, nullptr, false);
      if (entry.is_discarded() || !entry.contains("key") || !entry.contains("value")) continue;
      entries_[entry["key"].get<std::string>()] = entry["value"];
    }
  }

  const json* find(const std::string& key) const {
    auto it = entries_.find(key);
    return it == entries_.end() ? nullptr : &it->second;
  }

  void put(const std::string& key, json value) {
    if (path_.empty()) return;
    pending_.push_back(json{{"key", key}, {"value", value}});
    entries_[key] = std::move(value);
  }

  void flush() {
    if (path_.empty() || pending_.empty()) return;
    std::ofstream out(path_, std::ios::app);
    for (const auto& e : pending_) out << e.dump() << '\n';
    if (!out) err_ << "warning: could not append to " << path_ << '\n';
    pending_.clear();
  }

 private:
  std::ostream& err_;
  fs::path path_;
  std::map<std::string, json> entries_;
  std::vector<json> pending_;
};

std::string cache_key(const std::string& subcommand, const json& params) {
  std::string key = subcommand + "|";
  bool first = true;
  for (const auto& [k, v] : params.items()) {
    if (!first) key += ';';
    first = false;
    key += k + "=" + (v.is_string() ? v.get<std::string>() : v.dump());
  }
  return key;
}

std::ofstream open_output(const std::string& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open " + path + " for writing");
  return out;
}

std::string utc_timestamp() {
  const auto now = std::chrono::system_clock::now();
  const std::time_t t = std::chrono::system_clock::to_time_t(now);
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

std::string join(const std::vector<u64>& v, const char* sep) {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) s += sep;
    s += std::to_string(v[i]);
  }
  return s;
}

std::vector<u64> parse_list(const std::string& text) {
  std::vector<u64> values;
  for (const auto& item : csv::split(text, ',')) {
    u64 v = 0;
    auto [ptr, ec] = std::from_chars(item.data(), item.data() + item.size(), v);
    if (ec != std::errc() || ptr != item.data() + item.size() || item.empty()) {
      throw CLI::ValidationError("list", "'" + item + "' is not a nonnegative integer");
    }
    values.push_back(v);
  }
  return values;
}

std::pair<u64, u64> parse_range(const std::string& text) {
  const auto dots = text.find("..");
  if (dots == std::string::npos) throw CLI::ValidationError("--range", "expected lo..hi");
  auto num = [&](std::string_view s) {
    u64 v = 0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || ptr != s.data() + s.size() || s.empty()) {
      throw CLI::ValidationError("--range", "expected lo..hi, got " + text);
    }
    return v;
  };
  const std::string_view sv(text);
  return {num(sv.substr(0, dots)), num(sv.substr(dots + 2))};
}

// Everything a run needs to be described and replayed.
struct Invocation {
  std::string subcommand;
  json parameters = json::object();
  std::vector<std::string> argv;                            // canonical, replayable
  std::vector<std::pair<std::string, std::string>> files;  // (flag, path) of every file written

  void param(const std::string& flag, const json& value) {
    parameters[flag.substr(2)] = value;
    argv.push_back(flag);
    argv.push_back(value.is_string() ? value.get<std::string>() : value.dump());
  }
  void output(const std::string& flag, const std::string& path) {
    argv.push_back(flag);
    argv.push_back(path);
  }
};

void write_manifest(const Invocation& inv, std::ostream& err) {
  json files = json::array();
  for (const auto& [flag, path] : inv.files) files.push_back({{"flag", flag}, {"path", path}});
  json argv = json::array();
  argv.push_back(inv.subcommand);
  for (const auto& a : inv.argv) argv.push_back(a);
  const json manifest = {{"subcommand", inv.subcommand},
                         {"parameters", inv.parameters},
                         {"argv", argv},
                         {"version", kVersion},
                         {"timestamp", utc_timestamp()},
                         {"outputs", files}};
  std::vector<fs::path> targets;
  for (const auto& [flag, path] : inv.files) targets.push_back(path + ".manifest.json");
  if (targets.empty()) {
    std::error_code ec;
    fs::create_directories(cache_root() / "manifests", ec);
    targets.push_back(cache_root() / "manifests" / (inv.subcommand + ".json"));
  }
  for (const auto& target : targets) {
    std::ofstream out(target, std::ios::trunc);
    out << manifest.dump(2) << '\n';
    if (!out) err << "warning: could not write manifest " << target << '\n';
  }
}

// <stem>.<tag><ext>
std::string sibling_path(const std::string& path, const std::string& tag) {
  fs::path p(path);
  fs::path name = p.stem();
  name += "." + tag;
  name += p.extension();
  return (p.parent_path() / name).string();
}

struct Common {
  unsigned threads = 0;
  bool no_cache = false;
  std::ostream* err = nullptr;
};

void add_common(CLI::App* sub, Common& common) {
  sub->add_option("--threads", common.threads, "Worker threads (0 = all cores)");
  sub->add_flag("--no-cache", common.no_cache, "Neither read nor write the result cache");
}

// ---------------------------------------------------------------- fixed-points

struct FixedPointsArgs {
  std::optional<u64> p;
  std::optional<std::string> range;
  std::string out;
};

std::vector<ScanRow> cached_scan(u64 lo, u64 hi, unsigned threads, Cache& cache) {
  std::vector<u64> primes;
  if (hi <= 200'000'000) {
    for (u64 p : primes_up_to(std::max<u64>(hi, 2)).primes) {
      if (p >= lo && p <= hi) primes.push_back(p);
    }
  } else {
    for (u64 n = lo; n <= hi && n >= lo; ++n) {
      if (is_prime(n)) primes.push_back(n);
    }
  }
  std::vector<ScanRow> rows(primes.size());
  std::vector<std::size_t> missing;
  for (std::size_t i = 0; i < primes.size(); ++i) {
    const json* hit = cache.find("fixed-points|p=" + std::to_string(primes[i]));
    if (hit) {
      rows[i] = {primes[i], (*hit)["F"].get<u64>(), (*hit)["omega_pm1"].get<u32>()};
    } else {
      missing.push_back(i);
    }
  }
  // Runs of consecutive missing primes go through scan_primes in one piece.
  for (std::size_t a = 0; a < missing.size();) {
    std::size_t b = a;
    while (b + 1 < missing.size() && missing[b + 1] == missing[b] + 1) ++b;
    const auto summary = scan_primes(primes[missing[a]], primes[missing[b]], {}, threads);
    for (std::size_t k = 0; k < summary.rows.size(); ++k) {
      const ScanRow& row = summary.rows[k];
      rows[missing[a] + k] = row;
      cache.put("fixed-points|p=" + std::to_string(row.p), {{"F", row.F}, {"omega_pm1", row.omega_pm1}});
    }
    a = b + 1;
  }
  return rows;
}

int fixed_points(const FixedPointsArgs& a, const Common& common, Invocation& inv,
                 std::ostream& out) {
  if (a.p.has_value() == a.range.has_value()) {
    throw CLI::ValidationError("fixed-points", "give exactly one of --p and --range");
  }
  Cache cache(!common.no_cache, *common.err);
  std::vector<ScanRow> rows;
  if (a.p) {
    inv.param("--p", *a.p);
    if (!is_prime(*a.p)) throw DomainError(std::to_string(*a.p) + " is not prime");
    rows = cached_scan(*a.p, *a.p, 1, cache);
    out << "F(" << *a.p << ")=" << rows.front().F << '\n';
  } else {
    const auto [lo, hi] = parse_range(*a.range);
    if (lo < 2 || lo > hi) throw DomainError("--range needs 2 <= lo <= hi");
    inv.param("--range", std::to_string(lo) + ".." + std::to_string(hi));
    rows = cached_scan(lo, hi, common.threads, cache);
    const auto trivial = std::count_if(rows.begin(), rows.end(), [](const ScanRow& r) { return r.F == 1; });
    out << "primes=" << rows.size() << " F=1: " << trivial;
    if (!rows.empty()) {
      out << " fraction=" << csv::format(static_cast<double>(trivial) / static_cast<double>(rows.size()));
    }
    out << '\n';
  }
  cache.flush();
  if (!a.out.empty()) {
    inv.output("--out", a.out);
    auto f = open_output(a.out);
    write_scan_csv(f, rows);
    inv.files.emplace_back("--out", a.out);
  }
  return kOk;
}

// ---------------------------------------------------------------------- cq

struct CqArgs {
  u64 q = 0;
  u64 x0 = 1;
  std::string mode = "exact";
  u64 samples = 100000;
  u64 seed = 1;
  u64 budget = kDefaultBudget;
  std::string out;
};

int cq(const CqArgs& a, const Common& common, Invocation& inv, std::ostream& out) {
  inv.param("--q", a.q);
  inv.param("--x0", a.x0);
  inv.param("--mode", a.mode);
  if (a.mode == "exact") {
    inv.param("--budget", a.budget);
  } else {
    inv.param("--samples", a.samples);
    inv.param("--seed", a.seed);
  }

  json key_params = {{"mode", a.mode}, {"q", a.q}, {"x0", a.x0}};
  if (a.mode == "mc") {
    key_params["samples"] = a.samples;
    key_params["seed"] = a.seed;
  }
  const std::string key = cache_key("cq", key_params);
  Cache cache(!common.no_cache, *common.err);

  std::string row, message;
  if (const json* hit = cache.find(key)) {
    row = (*hit)["row"].get<std::string>();
    message = (*hit)["message"].get<std::string>();
  } else {
    const FormFamily family(a.q);
    const std::string q = std::to_string(a.q), x0 = std::to_string(a.x0);
    if (a.mode == "exact") {
      const auto e = exact_estimate(family, a.x0, a.budget);
      row = q + "," + x0 + ",exact," + csv::format(e.value) + ",0,0,," + e.fraction();
      message = "N=" + std::to_string(e.hits) + " c=" + e.fraction() + "≈" + csv::format_fixed(e.value, 5);
    } else {
      const auto e = mc_estimate_c(family, a.x0, a.samples, a.seed, {common.threads, false});
      row = q + "," + x0 + ",mc," + csv::format(e.value) + "," + std::to_string(e.samples) + "," +
            csv::format(e.std_error) + "," + std::to_string(e.seed) + ",";
      message = "c=" + csv::format_fixed(e.value, 5) + " stderr=" + csv::format_fixed(e.std_error, 5) +
                " hits=" + std::to_string(e.hits) + "/" + std::to_string(e.samples) +
                " seed=" + std::to_string(e.seed);
    }
    cache.put(key, {{"row", row}, {"message", message}});
    cache.flush();
  }
  out << message << '\n';
  if (!a.out.empty()) {
    inv.output("--out", a.out);
    auto f = open_output(a.out);
    f << "q,x0,mode,value,samples,stderr,seed,exact\n" << row << '\n';
    inv.files.emplace_back("--out", a.out);
  }
  return kOk;
}

// -------------------------------------------------------------------- nset

struct NSetArgs {
  u64 q = 0;
  double c1 = kDefaultC1;
  double c2 = kDefaultC2;
  std::string dump;
  std::string out;
};

int nset(const NSetArgs& a, Invocation& inv, std::ostream& out) {
  inv.param("--q", a.q);
  inv.param("--c1", csv::format(a.c1));
  inv.param("--c2", csv::format(a.c2));
  const NSetParams params = params_for(a.q, a.c1, a.c2);
  const NSet set = build(params);
  const double bound = theoretical_complement_bound(params);
  const double fraction = static_cast<double>(set.complement_size) / static_cast<double>(a.q);
  out << "q=" << a.q << " B=" << csv::format_fixed(params.B, 4) << " f=" << csv::format_fixed(params.f, 4)
      << " members=" << set.members.size() << " complement=" << set.complement_size
      << " bound=" << csv::format_fixed(bound, 1) << " complement/q=" << csv::format_fixed(fraction, 6)
      << (static_cast<double>(set.complement_size) <= bound ? " within bound" : " exceeds bound") << '\n';
  if (!a.dump.empty()) {
    inv.output("--dump", a.dump);
    auto f = open_output(a.dump);
    write_bitmap(f, set);
    inv.files.emplace_back("--dump", a.dump);
  }
  if (!a.out.empty()) {
    inv.output("--out", a.out);
    auto f = open_output(a.out);
    f << "q,c1,c2,B,f,members,complement,bound,complement_fraction\n"
      << a.q << ',' << csv::format(a.c1) << ',' << csv::format(a.c2) << ',' << csv::format(params.B) << ','
      << csv::format(params.f) << ',' << set.members.size() << ',' << set.complement_size << ','
      << csv::format(bound) << ',' << csv::format(fraction) << '\n';
    inv.files.emplace_back("--out", a.out);
  }
  return kOk;
}

// ----------------------------------------------------------------- multind

struct MultindArgs {
  std::string tuple;
  std::string sample_set;
  u64 q = 100003;
  std::size_t k = 3;
  u64 trials = 100000;
  u64 seed = 1;
  std::string out;
};

int multind(const MultindArgs& a, const Common& common, Invocation& inv, std::ostream& out) {
  if (a.tuple.empty() == a.sample_set.empty()) {
    throw CLI::ValidationError("multind", "give exactly one of --tuple and --sample-set");
  }
  std::ostringstream csv_text;
  if (!a.tuple.empty()) {
    const auto tuple = parse_list(a.tuple);
    inv.param("--tuple", join(tuple, ","));
    const std::size_t rank = multiplicative_rank(tuple);
    const auto relation = find_relation(tuple);
    std::string rel;
    if (relation) {
      rel = "(";
      for (std::size_t i = 0; i < relation->alphas.size(); ++i) {
        if (i) rel += ",";
        rel += std::to_string(relation->alphas[i]);
      }
      rel += ")";
    }
    out << "rank=" << rank << (relation ? " relation=" + rel : std::string(" independent")) << '\n';
    csv_text << "tuple,rank,relation\n" << join(tuple, " ") << ',' << rank << ',';
    if (relation) {
      for (std::size_t i = 0; i < relation->alphas.size(); ++i) {
        csv_text << (i ? " " : "") << relation->alphas[i];
      }
    }
    csv_text << '\n';
  } else {
    if (a.sample_set != "nset" && a.sample_set != "interval") {
      throw CLI::ValidationError("--sample-set", "expected nset or interval");
    }
    inv.param("--sample-set", a.sample_set);
    inv.param("--q", a.q);
    inv.param("--k", a.k);
    inv.param("--trials", a.trials);
    inv.param("--seed", a.seed);
    std::vector<u64> set;
    if (a.sample_set == "nset") {
      set = build(params_for(a.q)).members;
    } else {
      if (a.q < 3) throw DomainError("--q must be >= 3");
      for (u64 n = 2; n < a.q; ++n) set.push_back(n);
    }
    const auto rate = sample_dependence_rate(set, a.k, a.trials, a.seed, common.threads);
    out << "set=" << a.sample_set << " size=" << set.size() << " k=" << a.k << " dependent=" << rate.dependent
        << "/" << rate.trials << " fraction=" << csv::format(rate.fraction)
        << " stderr=" << csv::format(rate.std_error) << '\n';
    csv_text << "set,q,k,trials,seed,dependent,fraction,stderr\n"
             << a.sample_set << ',' << a.q << ',' << a.k << ',' << rate.trials << ',' << a.seed << ','
             << rate.dependent << ',' << csv::format(rate.fraction) << ',' << csv::format(rate.std_error)
             << '\n';
  }
  if (!a.out.empty()) {
    inv.output("--out", a.out);
    auto f = open_output(a.out);
    f << csv_text.str();
    inv.files.emplace_back("--out", a.out);
  }
  return kOk;
}

// ------------------------------------------------------------------- stats

struct StatsArgs {
  std::string scan;
  std::string group_by = "omega";
  std::string qq;
  std::string hist;
  std::string summary;
  double bin_width = 0.25;
  double hist_lo = -5;
  double hist_hi = 5;
};

struct Group {
  std::string label;
  std::string tag;
  bool flagged = false;
  std::vector<double> z;
};

int stats(const StatsArgs& a, Invocation& inv, std::ostream& out) {
  if (a.group_by != "omega" && a.group_by != "none") {
    throw CLI::ValidationError("--group-by", "expected omega or none");
  }
  inv.param("--scan", a.scan);
  inv.param("--group-by", a.group_by);
  inv.param("--bin-width", csv::format(a.bin_width));
  inv.param("--hist-lo", csv::format(a.hist_lo));
  inv.param("--hist-hi", csv::format(a.hist_hi));

  std::ifstream in(a.scan);
  if (!in) throw IoError("cannot read " + a.scan);
  const auto rows = read_scan_csv(in);
  const auto scored = score_rows(rows);
  if (scored.empty()) throw DomainError("stats: no primes >= 3 in " + a.scan);
  u64 p_lo = scored.front().row.p, p_hi = p_lo;
  for (const auto& s : scored) {
    p_lo = std::min(p_lo, s.row.p);
    p_hi = std::max(p_hi, s.row.p);
  }

  // The first group is the headline one and goes to the paths given on the
  // command line; the rest get tagged sibling files.
  std::vector<Group> groups;
  if (a.group_by == "none") {
    groups.push_back({"all", "all", false, {}});
    for (const auto& s : scored) groups[0].z.push_back(s.z);
  } else {
    groups.push_back({"omega>=3", "omega_ge3", false, {}});
    const OmegaGroup order[] = {OmegaGroup::low, OmegaGroup::three, OmegaGroup::four, OmegaGroup::five_plus};
    const char* tags[] = {"omega_le2", "omega3", "omega4", "omega_ge5"};
    for (int i = 0; i < 4; ++i) groups.push_back({group_label(order[i]), tags[i], outlier_prone(order[i]), {}});
    for (const auto& s : scored) {
      const OmegaGroup g = omega_group(s.row.omega_pm1);
      if (!outlier_prone(g)) groups[0].z.push_back(s.z);
      groups[1 + static_cast<int>(g)].z.push_back(s.z);
    }
  }

  std::vector<GroupSummary> summaries;
  for (std::size_t gi = 0; gi < groups.size(); ++gi) {
    const Group& g = groups[gi];
    const GroupSummary s = summarize(g.z, g.label, p_lo, p_hi, g.flagged);
    summaries.push_back(s);
    out << "group=" << g.label << " n=" << s.n;
    if (s.n) {
      out << " mean=" << csv::format_fixed(s.mean_z, 4) << " sd=" << csv::format_fixed(s.sd_z, 4)
          << " r2=" << (std::isnan(s.r2) ? std::string("nan") : csv::format_fixed(s.r2, 4));
    }
    if (g.flagged) out << " (outlier-prone)";
    out << '\n';

    const bool headline = gi == 0;
    if (!a.qq.empty() && s.n >= 3 && !std::isnan(s.r2)) {
      const std::string path = headline ? a.qq : sibling_path(a.qq, g.tag);
      auto f = open_output(path);
      write_qq_csv(f, qq_series(g.z));
      inv.files.emplace_back("--qq", path);
    }
    if (!a.hist.empty() && s.n >= 1) {
      const std::string path = headline ? a.hist : sibling_path(a.hist, g.tag);
      auto f = open_output(path);
      write_histogram_csv(f, histogram(g.z, a.bin_width, a.hist_lo, a.hist_hi));
      inv.files.emplace_back("--hist", path);
    }
  }
  if (!a.summary.empty()) {
    auto f = open_output(a.summary);
    write_summary_csv(f, summaries);
    inv.files.emplace_back("--summary", a.summary);
  }
  if (!a.qq.empty()) inv.output("--qq", a.qq);
  if (!a.hist.empty()) inv.output("--hist", a.hist);
  if (!a.summary.empty()) inv.output("--summary", a.summary);
  return kOk;
}

// -------------------------------------------------------------- bonferroni

struct BonferroniArgs {
  u64 q = 0;
  std::string family;
  std::size_t K = 1;
  u64 budget = kDefaultBudget;
  std::string out;
};

int bonferroni(const BonferroniArgs& a, Invocation& inv, std::ostream& out) {
  const auto sub = parse_list(a.family);
  inv.param("--q", a.q);
  inv.param("--family", join(sub, ","));
  inv.param("--K", a.K);
  inv.param("--budget", a.budget);
  const FormFamily family(a.q);
  const auto b = bonferroni_bounds(family, sub, a.K, a.budget);
  const std::string lower = b.materialize(b.lower).str();
  const std::string upper = b.materialize(b.upper).str();
  const std::string total = b.materialize(b.total).str();
  const bool ok = b.lower <= b.total && b.total <= b.upper;
  out << "K=" << a.K << " lower=" << lower << " upper=" << upper << " exact=" << total;
  if (b.enumerated) out << " enumerated=" << b.enumerated->str();
  out << (ok ? " sandwich=ok" : " sandwich=violated") << '\n';
  if (!a.out.empty()) {
    inv.output("--out", a.out);
    auto f = open_output(a.out);
    f << "q,K,family_size,lower,upper,exact,enumerated\n"
      << a.q << ',' << a.K << ',' << b.family_size << ',' << lower << ',' << upper << ',' << total << ','
      << (b.enumerated ? b.enumerated->str() : std::string()) << '\n';
    inv.files.emplace_back("--out", a.out);
  }
  return kOk;
}

// ------------------------------------------------------------------ replay

std::string slurp(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

int replay(const std::string& manifest_path, bool check, std::ostream& out, std::ostream& err) {
  std::ifstream in(manifest_path);
  if (!in) throw IoError("cannot read " + manifest_path);
  const json manifest = json::parse(in, nullptr, false);
  if (manifest.is_discarded() || !manifest.contains("argv")) {
    throw DomainError(manifest_path + " is not a run manifest");
  }
  if (manifest.value("version", "") != kVersion) {
    err << "warning: manifest written by version " << manifest.value("version", "?") << ", this is " << kVersion
        << '\n';
  }
  std::vector<std::string> argv = manifest["argv"].get<std::vector<std::string>>();
  if (!check) return run(argv, out, err);

  // Rerun into a scratch directory, one subdirectory per output flag so that
  // derived file names stay unchanged, and compare byte for byte.
  const fs::path scratch = fs::temp_directory_path() /
                           ("xpowx-replay-" + std::to_string(std::chrono::steady_clock::now().time_since_epoch().count()));
  std::map<std::string, fs::path> dirs;
  for (std::size_t i = 1; i + 1 < argv.size(); ++i) {
    const std::string& flag = argv[i];
    if (flag == "--out" || flag == "--dump" || flag == "--qq" || flag == "--hist" || flag == "--summary") {
      const fs::path dir = scratch / flag.substr(2);
      fs::create_directories(dir);
      dirs[flag] = dir;
      argv[i + 1] = (dir / fs::path(argv[i + 1]).filename()).string();
      ++i;
    }
  }
  argv.push_back("--no-cache");
  std::ostringstream quiet;
  const int code = run(argv, quiet, err);
  int result = code;
  if (code == kOk) {
    for (const auto& f : manifest["outputs"]) {
      const std::string path = f["path"].get<std::string>();
      const fs::path fresh = dirs[f["flag"].get<std::string>()] / fs::path(path).filename();
      const bool same = fs::exists(fresh) && slurp(path) == slurp(fresh);
      out << (same ? "identical " : "differs ") << path << '\n';
      if (!same) result = kFailure;
    }
  }
  std::error_code ec;
  fs::remove_all(scratch, ec);
  return result;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Experiments on x^x mod p, avoidance counts of prime-exponent linear forms, and the "
               "fixed-point statistics model.",
               "xpowx"};
  app.require_subcommand(1);
  app.set_version_flag("--version", kVersion);

  Common common;
  common.err = &err;

  FixedPointsArgs fp;
  auto* fp_cmd = app.add_subcommand("fixed-points", "F(p) for one prime or every prime in a range");
  fp_cmd->add_option("--p", fp.p, "A prime");
  fp_cmd->add_option("--range", fp.range, "lo..hi, inclusive");
  fp_cmd->add_option("--out", fp.out, "CSV with columns p,F,omega_pm1");
  add_common(fp_cmd, common);

  CqArgs cq_args;
  auto* cq_cmd = app.add_subcommand("cq", "N_q(x0)/q^d, exactly or by Monte-Carlo");
  cq_cmd->add_option("--q", cq_args.q, "Prime q >= 3")->required();
  cq_cmd->add_option("--x0", cq_args.x0, "Target value in [1, q-1]");
  cq_cmd->add_option("--mode", cq_args.mode)->check(CLI::IsMember({"exact", "mc"}));
  cq_cmd->add_option("--samples", cq_args.samples);
  cq_cmd->add_option("--seed", cq_args.seed);
  cq_cmd->add_option("--budget", cq_args.budget, "Largest q^d enumerated in exact mode");
  cq_cmd->add_option("--out", cq_args.out, "CSV with columns q,x0,mode,value,samples,stderr,seed,exact");
  add_common(cq_cmd, common);

  NSetArgs ns;
  auto* ns_cmd = app.add_subcommand("nset", "Build N_q and compare its complement with the bound");
  ns_cmd->add_option("--q", ns.q)->required();
  ns_cmd->add_option("--c1", ns.c1);
  ns_cmd->add_option("--c2", ns.c2);
  ns_cmd->add_option("--dump", ns.dump, "Write the membership bitmap here");
  ns_cmd->add_option("--out", ns.out, "CSV summary");
  add_common(ns_cmd, common);

  MultindArgs mi;
  auto* mi_cmd = app.add_subcommand("multind", "Multiplicative rank of a tuple, or sampled dependence rate");
  mi_cmd->add_option("--tuple", mi.tuple, "n1,n2,...");
  mi_cmd->add_option("--sample-set", mi.sample_set, "nset or interval");
  mi_cmd->add_option("--q", mi.q);
  mi_cmd->add_option("--k", mi.k);
  mi_cmd->add_option("--trials", mi.trials);
  mi_cmd->add_option("--seed", mi.seed);
  mi_cmd->add_option("--out", mi.out);
  add_common(mi_cmd, common);

  StatsArgs st;
  auto* st_cmd = app.add_subcommand("stats", "Normalized F(p) statistics from a scan CSV");
  st_cmd->add_option("--scan", st.scan, "CSV written by fixed-points --out")->required();
  st_cmd->add_option("--group-by", st.group_by, "omega or none");
  st_cmd->add_option("--qq", st.qq, "Q-Q CSV (theoretical,observed)");
  st_cmd->add_option("--hist", st.hist, "Histogram CSV (bin_lo,bin_hi,count,overlay)");
  st_cmd->add_option("--summary", st.summary, "Per-group summary CSV");
  st_cmd->add_option("--bin-width", st.bin_width);
  st_cmd->add_option("--hist-lo", st.hist_lo);
  st_cmd->add_option("--hist-hi", st.hist_hi);
  add_common(st_cmd, common);

  BonferroniArgs bf;
  auto* bf_cmd = app.add_subcommand("bonferroni", "Truncated inclusion-exclusion bounds for M_{q,N'}");
  bf_cmd->add_option("--q", bf.q)->required();
  bf_cmd->add_option("--family", bf.family, "n1,n2,...")->required();
  bf_cmd->add_option("--K", bf.K);
  bf_cmd->add_option("--budget", bf.budget);
  bf_cmd->add_option("--out", bf.out);
  add_common(bf_cmd, common);

  std::string manifest_path;
  bool check = false;
  auto* rp_cmd = app.add_subcommand("replay", "Rerun the command recorded in a manifest");
  rp_cmd->add_option("--manifest", manifest_path)->required();
  rp_cmd->add_flag("--check", check, "Rerun into a scratch directory and compare outputs");

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kUsage;
  }

  try {
    if (rp_cmd->parsed()) return replay(manifest_path, check, out, err);

    Invocation inv;
    int code = kOk;
    if (fp_cmd->parsed()) {
      inv.subcommand = "fixed-points";
      code = fixed_points(fp, common, inv, out);
    } else if (cq_cmd->parsed()) {
      inv.subcommand = "cq";
      code = cq(cq_args, common, inv, out);
    } else if (ns_cmd->parsed()) {
      inv.subcommand = "nset";
      code = nset(ns, inv, out);
    } else if (mi_cmd->parsed()) {
      inv.subcommand = "multind";
      code = multind(mi, common, inv, out);
    } else if (st_cmd->parsed()) {
      inv.subcommand = "stats";
      code = stats(st, inv, out);
    } else if (bf_cmd->parsed()) {
      inv.subcommand = "bonferroni";
      code = bonferroni(bf, inv, out);
    }
    if (code == kOk) write_manifest(inv, err);
    return code;
  } catch (const CLI::ValidationError& e) {
    err << "error: " << e.what() << '\n';
    return kUsage;
  } catch (const BudgetError& e) {
    err << "error: " << e.what() << " (required " << e.required() << ")\n";
    return kBudget;
  } catch (const DomainError& e) {
    err << "error: " << e.what() << '\n';
    return kDomain;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kFailure;
  }
}

}  // namespace xpowx::cli
