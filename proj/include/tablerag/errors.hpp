/*
 * Copyright 2026 The tablerag-cpp Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */


#pragma once

#include <stdexcept>
#include <string>

namespace tablerag {

/// Base of every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class IoError : public Error {
public:
    using Error::Error;
};

class FormatError : public Error {
public:
    using Error::Error;
};

/// A manifest instance names a table_id that the manifest does not define.
class DanglingReference : public Error {
public:
    using Error::Error;
};

class DimMismatch : public Error {
public:
    using Error::Error;
};

/// HTTP failure (or malformed response) after all retries.
class RemoteError : public Error {
public:
    using Error::Error;
};

class EmptyInput : public Error {
public:
    using Error::Error;
};

/// The scripted chat model has no unconsumed reply for a prompt.
class ScriptExhausted : public Error {
public:
    using Error::Error;
};

class ParseFailure : public Error {
public:
    using Error::Error;
};

class NoFinalAnswer : public Error {
public:
    using Error::Error;
};

class EmptyGold : public Error {
public:
    using Error::Error;
};

class InvalidTarget : public Error {
public:
    using Error::Error;
};

}  // namespace tablerag
