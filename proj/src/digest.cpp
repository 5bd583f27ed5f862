#include "stegscan/digest.hpp"

#include <memory>

#include <openssl/evp.h>

#include "stegscan/error.hpp"

namespace stegscan {
namespace {

std::string evp_hex(const EVP_MD* md, ByteView data) {
    std::unique_ptr<EVP_MD_CTX, decltype(&EVP_MD_CTX_free)> ctx(EVP_MD_CTX_new(), &EVP_MD_CTX_free);
    unsigned char out[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    if (!ctx || EVP_DigestInit_ex(ctx.get(), md, nullptr) != 1 ||
        EVP_DigestUpdate(ctx.get(), data.data(), data.size()) != 1 ||
        EVP_DigestFinal_ex(ctx.get(), out, &len) != 1)
        throw Error(Errc::io_failure, "digest computation failed");
    return to_hex(ByteView(out, len));
}

}  // namespace

std::string md5_hex(ByteView data) { return evp_hex(EVP_md5(), data); }
std::string sha1_hex(ByteView data) { return evp_hex(EVP_sha1(), data); }
std::string sha256_hex(ByteView data) { return evp_hex(EVP_sha256(), data); }

Digests compute_digests(ByteView data, bool with_sha1) {
    Digests d;
    d.md5 = md5_hex(data);
    if (with_sha1) d.sha1 = sha1_hex(data);
    d.sha256 = sha256_hex(data);
    return d;
}

}  // namespace stegscan
