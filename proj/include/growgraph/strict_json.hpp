#pragma once

#include <initializer_list>
#include <string>

#include <json.hpp>

#include "growgraph/errors.hpp"

namespace growgraph::strict {

/// Rejects any key of `obj` not listed in `allowed`.
void require_keys(const nlohmann::json& obj, std::initializer_list<const char*> allowed,
                  const std::string& where);

double number(const nlohmann::json& obj, const char* key, const std::string& where);
double number_or(const nlohmann::json& obj, const char* key, double fallback,
                 const std::string& where);
std::uint64_t unsigned_int(const nlohmann::json& obj, const char* key, const std::string& where);
std::uint64_t unsigned_or(const nlohmann::json& obj, const char* key, std::uint64_t fallback,
                          const std::string& where);
bool boolean_or(const nlohmann::json& obj, const char* key, bool fallback, const std::string& where);
std::string string(const nlohmann::json& obj, const char* key, const std::string& where);
std::string string_or(const nlohmann::json& obj, const char* key, const std::string& fallback,
                      const std::string& where);
const nlohmann::json& object(const nlohmann::json& obj, const char* key, const std::string& where);

}  // namespace growgraph::strict
