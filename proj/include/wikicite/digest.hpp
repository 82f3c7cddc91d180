#pragma once

#include <filesystem>
#include <memory>
#include <streambuf>
#include <string>
#include <string_view>
#include <vector>

namespace wikicite {

/// Incremental SHA-256 (OpenSSL EVP), hex-encoded on finish.
class Sha256 {
 public:
  Sha256();
  ~Sha256();
  Sha256(const Sha256&) = delete;
  Sha256& operator=(const Sha256&) = delete;

  void update(std::string_view bytes);
  std::string hex_digest();

 private:
  struct Ctx;
  std::unique_ptr<Ctx> ctx_;
};

std::string sha256_hex(std::string_view bytes);
std::string sha256_file(const std::filesystem::path& path);

/// Read-side stream buffer that hashes every byte pulled through it, so a
/// dump read once from a pipe can still be fingerprinted.
class HashingStreamBuf : public std::streambuf {
 public:
  explicit HashingStreamBuf(std::streambuf* source, std::size_t buffer_size = 1 << 16);
  std::string hex_digest() { return hash_.hex_digest(); }

 protected:
  int_type underflow() override;

 private:
  std::streambuf* source_;
  std::vector<char> buffer_;
  Sha256 hash_;
};

}  // namespace wikicite
