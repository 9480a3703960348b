#pragma once

#include <fcntl.h>
#include <unistd.h>

#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <string>
#include <thread>

#include "laver_table.hpp"

namespace ldlab {

using TableHandle = std::shared_ptr<const LaverTable>;

// Process-wide memo of built tables.
inline TableHandle shared_table(unsigned k) {
    static std::mutex mu;
    static std::map<unsigned, TableHandle> tables;
    {
        std::lock_guard<std::mutex> g(mu);
        auto it = tables.find(k);
        if (it != tables.end()) return it->second;
    }
    auto t = std::make_shared<const LaverTable>(build_table(k, true));
    std::lock_guard<std::mutex> g(mu);
    return tables.emplace(k, t).first->second;
}

inline std::filesystem::path default_cache_dir() {
    if (const char* e = std::getenv("LDLAB_CACHE"); e && *e) return e;
    if (const char* x = std::getenv("XDG_CACHE_HOME"); x && *x) return std::filesystem::path(x) / "ldlab";
    if (const char* h = std::getenv("HOME"); h && *h) return std::filesystem::path(h) / ".cache" / "ldlab";
    return std::filesystem::temp_directory_path() / "ldlab";
}

// Tables on disk in the binary format; writers hold an exclusive lock file.
class TableCache {
public:
    explicit TableCache(std::filesystem::path dir) : dir_(std::move(dir)) {}

    const std::filesystem::path& dir() const { return dir_; }
    std::filesystem::path path_for(unsigned k) const { return dir_ / ("laver-" + std::to_string(k) + ".ldt"); }

    bool contains(unsigned k) const { return std::filesystem::exists(path_for(k)); }

    // Loads a cached table or builds and stores it. Sets `built` when a build happened.
    LaverTable get(unsigned k, bool force = false, bool* built = nullptr) {
        if (built) *built = false;
        auto p = path_for(k);
        if (std::filesystem::exists(p)) {
            try {
                return load_table(p.string());
            } catch (const CorruptFile&) {
            }
        }
        LaverTable t = build_table(k, force);
        if (built) *built = true;
        store(t);
        return t;
    }

    void store(const LaverTable& t) {
        std::filesystem::create_directories(dir_);
        auto p = path_for(t.level());
        auto lock = p;
        lock += ".lock";
        int fd = -1;
        for (int attempt = 0; attempt < 600; ++attempt) {
            fd = ::open(lock.c_str(), O_CREAT | O_EXCL | O_WRONLY, 0644);
            if (fd >= 0) break;
            std::this_thread::sleep_for(std::chrono::milliseconds(50));
        }
        if (fd < 0) throw IoError("cache lock busy: " + lock.string());
        auto tmp = p;
        tmp += ".tmp" + std::to_string(::getpid());
        try {
            save_table(t, tmp.string());
            std::filesystem::rename(tmp, p);
        } catch (...) {
            ::close(fd);
            std::filesystem::remove(lock);
            std::filesystem::remove(tmp);
            throw;
        }
        ::close(fd);
        std::filesystem::remove(lock);
    }

private:
    std::filesystem::path dir_;
};

} // namespace ldlab
