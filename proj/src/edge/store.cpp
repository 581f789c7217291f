#include "gaius/edge/store.hpp"

#include "gaius/common/error.hpp"
#include "gaius/common/fs.hpp"
#include "gaius/maml/codec.hpp"

#include <algorithm>
#include <fstream>
#include <functional>

#include <fcntl.h>
#include <unistd.h>

namespace gaius::edge {

namespace fs = std::filesystem;

namespace {

void require_key(std::string_view key) {
    if (!FileStore::valid_key(key)) throw Error(Errc::invalid_argument, "invalid store key '" + std::string(key) + "'");
}

std::optional<std::string> read_if_exists(const fs::path& p) {
    std::error_code ec;
    if (!fs::is_regular_file(p, ec)) return std::nullopt;
    return read_file(p);
}

bool is_temp(const fs::path& p) { return p.filename().string().find(".tmp.") != std::string::npos; }

}  // namespace

std::string media_extension(std::string_view mime) {
    if (mime == "image/jpeg") return "jpg";
    if (mime == "image/png") return "png";
    if (mime == "image/gif") return "gif";
    if (mime == "image/webp") return "webp";
    if (mime == "video/mp4") return "mp4";
    if (mime == "video/webm") return "webm";
    return "bin";
}

FileStore::FileStore(fs::path root) : root_(std::move(root)) {
    for (const char* dir : {"pages", "communities", "content", "users", "tokens", "campaigns", "media", "logs"}) {
        fs::create_directories(root_ / dir);
    }
}

bool FileStore::valid_key(std::string_view key) noexcept {
    if (key.empty() || key.size() > 128 || key.front() == '.') return false;
    for (char c : key) {
        const bool ok = (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') || c == '-' ||
                        c == '_' || c == '.';
        if (!ok) return false;
    }
    return key.find(".tmp.") == std::string_view::npos;
}

std::shared_mutex& FileStore::stripe(std::string_view kind, std::string_view key) const {
    const auto h = std::hash<std::string_view>{}(kind) * 31 + std::hash<std::string_view>{}(key);
    return stripes_[h % stripes_.size()];
}

fs::path FileStore::record_path(std::string_view kind, std::string_view key) const {
    require_key(key);
    return root_ / std::string(kind) / (std::string(key) + ".json");
}

std::optional<std::string> FileStore::read_page_bytes(std::string_view page_id) const {
    const auto path = record_path("pages", page_id);
    std::shared_lock lock(stripe("pages", page_id));
    return read_if_exists(path);
}

std::optional<maml::Page> FileStore::read_page(std::string_view page_id) const {
    const auto bytes = read_page_bytes(page_id);
    if (!bytes) return std::nullopt;
    return maml::parse_page(*bytes);
}

maml::Page FileStore::update_page(std::string_view page_id,
                                  const std::function<maml::Page(const std::optional<maml::Page>&)>& update) {
    const auto path = record_path("pages", page_id);
    std::unique_lock lock(stripe("pages", page_id));
    std::optional<maml::Page> current;
    if (auto bytes = read_if_exists(path)) current = maml::parse_page(*bytes);
    maml::Page next = update(current);
    write_file_atomic(path, maml::serialize_page(next));
    return next;
}

std::optional<json> FileStore::read_record(std::string_view kind, std::string_view key) const {
    const auto path = record_path(kind, key);
    std::shared_lock lock(stripe(kind, key));
    const auto bytes = read_if_exists(path);
    if (!bytes) return std::nullopt;
    return json::parse(*bytes);
}

void FileStore::write_record(std::string_view kind, std::string_view key, const json& value) {
    const auto path = record_path(kind, key);
    std::unique_lock lock(stripe(kind, key));
    write_file_atomic(path, value.dump(1));
}

std::vector<json> FileStore::read_all(std::string_view kind) const {
    std::vector<fs::path> files;
    for (const auto& entry : fs::directory_iterator(root_ / std::string(kind))) {
        if (entry.is_regular_file() && entry.path().extension() == ".json" && !is_temp(entry.path())) {
            files.push_back(entry.path());
        }
    }
    std::sort(files.begin(), files.end());
    std::vector<json> out;
    for (const auto& f : files) {
        const auto key = f.stem().string();
        std::shared_lock lock(stripe(kind, key));
        out.push_back(json::parse(read_file(f)));
    }
    return out;
}

std::optional<std::string> FileStore::read_token(std::string_view token) const {
    require_key(token);
    std::shared_lock lock(stripe("tokens", token));
    return read_if_exists(root_ / "tokens" / std::string(token));
}

void FileStore::write_token(std::string_view token, std::string_view user_id) {
    require_key(token);
    std::unique_lock lock(stripe("tokens", token));
    write_file_atomic(root_ / "tokens" / std::string(token), user_id);
}

std::optional<policy::MediaVariantSet> FileStore::read_variants(std::string_view media_id) const {
    require_key(media_id);
    std::shared_lock lock(stripe("media", media_id));
    const auto bytes = read_if_exists(root_ / "media" / std::string(media_id) / "variants.json");
    if (!bytes) return std::nullopt;
    return variants_from_json(json::parse(*bytes));
}

void FileStore::write_media(const policy::MediaVariantSet& set, const std::array<std::string, 3>& bytes) {
    require_key(set.media_id);
    const auto dir = root_ / "media" / set.media_id;
    std::unique_lock lock(stripe("media", set.media_id));
    for (auto f : policy::kAllFidelities) {
        const auto& v = set.at(f);
        if (!v) continue;
        write_file_atomic(dir / (std::string(policy::fidelity_name(f)) + "." + media_extension(v->mime)),
                          bytes[static_cast<std::size_t>(f)]);
    }
    // The index goes last: a set is visible only once all its files exist.
    write_file_atomic(dir / "variants.json", to_json(set).dump(1));
}

std::optional<std::string> FileStore::read_media(std::string_view media_id, policy::Fidelity f) const {
    const auto set = read_variants(media_id);
    if (!set || !set->at(f)) return std::nullopt;
    std::shared_lock lock(stripe("media", media_id));
    return read_if_exists(root_ / "media" / std::string(media_id) /
                          (std::string(policy::fidelity_name(f)) + "." + media_extension(set->at(f)->mime)));
}

void FileStore::append_log(const RequestLog& record) {
    const auto line = to_json(record).dump() + "\n";
    std::lock_guard lock(log_mu_);
    const auto path = root_ / "logs" / "requests.jsonl";
    const int fd = ::open(path.c_str(), O_WRONLY | O_CREAT | O_APPEND, 0644);
    if (fd < 0) throw Error(Errc::io_error, "cannot open " + path.string());
    const auto n = ::write(fd, line.data(), line.size());
    ::fsync(fd);
    ::close(fd);
    if (n != static_cast<ssize_t>(line.size())) throw Error(Errc::io_error, "short write to " + path.string());
}

std::vector<RequestLog> FileStore::read_log() const {
    std::lock_guard lock(log_mu_);
    std::vector<RequestLog> out;
    std::ifstream in(root_ / "logs" / "requests.jsonl");
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        out.push_back(request_log_from_json(json::parse(line)));
    }
    return out;
}

}  // namespace gaius::edge
