#pragma once

#include "swd/error.hpp"

#include <doctest.h>

#include <filesystem>
#include <random>
#include <string>

namespace swd::test {

/// Scratch directory removed on destruction.
class TempDir {
public:
    explicit TempDir(const std::string& tag) {
        std::random_device rd;
        path_ = std::filesystem::temp_directory_path() / ("swd_" + tag + "_" + std::to_string(rd()));
        std::filesystem::create_directories(path_);
    }
    ~TempDir() {
        std::error_code ec;
        std::filesystem::remove_all(path_, ec);
    }
    TempDir(const TempDir&) = delete;
    TempDir& operator=(const TempDir&) = delete;

    const std::filesystem::path& path() const noexcept { return path_; }
    std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

private:
    std::filesystem::path path_;
};

}  // namespace swd::test

/// Checks that `expr` throws swd::Error with the given code.
#define CHECK_SWD_ERROR(expr, expected_code)                                  \
    do {                                                                      \
        bool swd_thrown_ = false;                                             \
        try {                                                                 \
            (void)(expr);                                                     \
        } catch (const swd::Error& swd_e_) {                                  \
            swd_thrown_ = true;                                               \
            CHECK_MESSAGE(swd_e_.code() == (expected_code), swd_e_.what());   \
        }                                                                     \
        CHECK_MESSAGE(swd_thrown_, "expected swd::Error from " #expr);        \
    } while (false)
