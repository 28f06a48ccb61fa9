//! HTTP translation backend.
//!
//! Sends `POST {"q", "source", "target"}` and expects a JSON response with a
//! `translatedText` field. Failed attempts are retried with exponential
//! backoff; responses are whitespace-normalized and written through to an
//! optional persistent cache, which is consulted before any network call.

use std::time::Duration;

use super::{
    normalize_translation, CacheStore, TranslateError, TranslationBackend, TranslationRequest,
};

/// Connection knobs. The defaults are the contract: base delay 250 ms,
/// factor 2, at most 5 attempts.
#[derive(Debug, Clone)]
pub struct HttpBackendConfig {
    pub url: String,
    /// Header name/value pair carrying the API credential, if any.
    pub api_key_header: Option<(String, String)>,
    pub max_attempts: u32,
    pub backoff_base: Duration,
    pub backoff_factor: u32,
}

impl HttpBackendConfig {
    pub fn new(url: impl Into<String>) -> Self {
        Self {
            url: url.into(),
            api_key_header: None,
            max_attempts: 5,
            backoff_base: Duration::from_millis(250),
            backoff_factor: 2,
        }
    }
}

pub struct HttpBackend {
    config: HttpBackendConfig,
    cache: Option<CacheStore>,
}

impl HttpBackend {
    pub fn new(config: HttpBackendConfig, cache: Option<CacheStore>) -> Self {
        Self { config, cache }
    }

    pub fn cache(&self) -> Option<&CacheStore> {
        self.cache.as_ref()
    }

    fn request_once(&self, request: &TranslationRequest) -> Result<String, TranslateError> {
        let mut req = ureq::post(&self.config.url);
        if let Some((name, value)) = &self.config.api_key_header {
            req = req.header(name.as_str(), value.as_str());
        }
        let body = serde_json::json!({
            "q": request.text(),
            "source": request.source_lang(),
            "target": request.target_lang(),
        });
        let mut response = req.send_json(&body).map_err(map_ureq_error)?;
        let payload: serde_json::Value = response.body_mut().read_json().map_err(map_ureq_error)?;
        let translated = payload
            .get("translatedText")
            .and_then(|v| v.as_str())
            .ok_or_else(|| TranslateError::Http {
                status: None,
                message: "response has no translatedText field".into(),
            })?;
        let translated = normalize_translation(translated);
        if translated.is_empty() {
            return Err(TranslateError::EmptyTranslation(request.text().to_string()));
        }
        Ok(translated)
    }
}

fn map_ureq_error(err: ureq::Error) -> TranslateError {
    match err {
        ureq::Error::StatusCode(status) => TranslateError::Http {
            status: Some(status),
            message: "server returned an error status".into(),
        },
        other => TranslateError::Http {
            status: None,
            message: other.to_string(),
        },
    }
}

/// Server errors and rate limiting are worth retrying; other client
/// errors are not.
fn retryable(err: &TranslateError) -> bool {
    match err {
        TranslateError::Http {
            status: Some(s), ..
        } => *s >= 500 || *s == 429,
        TranslateError::Http { status: None, .. } => true,
        _ => false,
    }
}

impl TranslationBackend for HttpBackend {
    fn translate(&self, request: &TranslationRequest) -> Result<String, TranslateError> {
        if let Some(cache) = &self.cache {
            if let Some(hit) = cache.lookup(request) {
                return Ok(hit);
            }
        }
        let mut delay = self.config.backoff_base;
        let mut last_err = None;
        for attempt in 1..=self.config.max_attempts {
            match self.request_once(request) {
                Ok(translation) => {
                    if let Some(cache) = &self.cache {
                        cache.append(request, &translation)?;
                    }
                    return Ok(translation);
                }
                Err(err) if retryable(&err) && attempt < self.config.max_attempts => {
                    std::thread::sleep(delay);
                    delay *= self.config.backoff_factor;
                    last_err = Some(err);
                }
                Err(err) => return Err(err),
            }
        }
        Err(last_err.expect("loop ran at least once"))
    }
}
