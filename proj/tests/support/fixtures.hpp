#pragma once

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

namespace blockoff::testing {

inline std::filesystem::path fixture_dir() { return BLOCKOFF_FIXTURE_DIR; }
inline std::filesystem::path fixture_build_dir() { return BLOCKOFF_FIXTURE_BUILD_DIR; }
inline std::filesystem::path app(const std::string& name) { return fixture_dir() / "apps" / name; }
inline std::filesystem::path profiles_file() { return fixture_build_dir() / "profiles.json"; }

inline std::string read_file(const std::filesystem::path& p)
{
    std::ifstream in(p, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

inline void write_file(const std::filesystem::path& p, const std::string& text)
{
    std::filesystem::create_directories(p.parent_path());
    std::ofstream(p, std::ios::binary | std::ios::trunc) << text;
}

/// Fresh, empty directory under the system temp dir.
inline std::filesystem::path scratch_dir(const std::string& tag)
{
    const auto dir = std::filesystem::temp_directory_path() / ("blockoff_test_" + tag);
    std::filesystem::remove_all(dir);
    std::filesystem::create_directories(dir);
    return dir;
}

}  // namespace blockoff::testing
