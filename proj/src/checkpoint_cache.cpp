#include "primelab/checkpoint_cache.hpp"

#include "primelab/errors.hpp"

#include <algorithm>
#include <cstdlib>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>

namespace primelab {

std::filesystem::path default_cache_dir() {
    if (const char* env = std::getenv("PRIME_LAB_CACHE"); env && *env) return env;
    return "cache";
}

std::vector<PiCheckpoint> read_checkpoints(std::istream& in) {
    std::vector<PiCheckpoint> out;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        const auto tab = line.find('\t');
        if (tab == std::string::npos || line.find('\t', tab + 1) != std::string::npos)
            throw Error("checkpoint line " + std::to_string(lineno) + ": expected n<TAB>pi_n");
        PiCheckpoint cp;
        try {
            std::size_t used = 0;
            const std::string a = line.substr(0, tab), b = line.substr(tab + 1);
            cp.n = std::stoull(a, &used);
            if (used != a.size()) throw std::invalid_argument(a);
            cp.pi_n = std::stoull(b, &used);
            if (used != b.size()) throw std::invalid_argument(b);
        } catch (const std::logic_error&) {
            throw Error("checkpoint line " + std::to_string(lineno) + ": not an integer pair");
        }
        if (!out.empty() && (cp.n <= out.back().n || cp.pi_n < out.back().pi_n))
            throw Error("checkpoint line " + std::to_string(lineno) + ": not ascending");
        out.push_back(cp);
    }
    return out;
}

void write_checkpoints(std::ostream& out, std::span<const PiCheckpoint> cps) {
    for (const auto& cp : cps) out << cp.n << '\t' << cp.pi_n << '\n';
}

CheckpointCache::CheckpointCache(std::filesystem::path dir) : file_(std::move(dir) / "pi.tsv") {}

bool CheckpointCache::load() {
    entries_.clear();
    std::ifstream in(file_);
    if (!in) return true;
    try {
        for (const auto& cp : read_checkpoints(in)) entries_.emplace(cp.n, cp.pi_n);
    } catch (const Error&) {
        entries_.clear();
        return false;
    }
    return true;
}

void CheckpointCache::save() const {
    std::filesystem::create_directories(file_.parent_path().empty() ? "." : file_.parent_path());
    std::vector<PiCheckpoint> cps;
    cps.reserve(entries_.size());
    for (const auto& [n, pi] : entries_) cps.push_back({n, pi});
    const auto tmp = file_.string() + ".tmp";
    {
        std::ofstream out(tmp, std::ios::trunc);
        if (!out) throw Error("cannot write " + tmp);
        write_checkpoints(out, cps);
    }
    std::filesystem::rename(tmp, file_);
}

std::optional<std::uint64_t> CheckpointCache::lookup(std::uint64_t n) const {
    if (auto it = entries_.find(n); it != entries_.end()) return it->second;
    return std::nullopt;
}

void CheckpointCache::insert(std::span<const PiCheckpoint> cps) {
    for (const auto& cp : cps) entries_[cp.n] = cp.pi_n;
}

std::vector<PiCheckpoint> CheckpointCache::resolve(const SegmentedSieve& sieve, std::span<const std::uint64_t> ns) {
    std::vector<std::uint64_t> missing;
    for (auto n : ns)
        if (!entries_.contains(n)) missing.push_back(n);
    if (!missing.empty()) insert(sieve.count_at(missing));
    std::vector<std::uint64_t> want(ns.begin(), ns.end());
    std::sort(want.begin(), want.end());
    want.erase(std::unique(want.begin(), want.end()), want.end());
    std::vector<PiCheckpoint> out;
    out.reserve(want.size());
    for (auto n : want) out.push_back({n, entries_.at(n)});
    return out;
}

} // namespace primelab
