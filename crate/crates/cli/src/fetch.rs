use std::io::Read;
use std::path::Path;

use flate2::read::GzDecoder;
use qubosvm::data::{digest_path, sha256_hex, Manifest};

use crate::{io_err, CliResult, Failure};

/// Downloads every manifest entry with a URL that is missing or fails its
/// digest check. Entries without a pinned digest get a `.sha256` file
/// recording what was downloaded, which later loads check against.
pub fn run(dir: &Path, only: Option<&str>, force: bool) -> CliResult {
    let manifest = Manifest::load(dir)?;
    if let Some(name) = only {
        if !manifest.files.iter().any(|f| f.dataset == name) {
            return Err(Failure::Usage(format!("no manifest entries for data set `{name}`")));
        }
    }
    for entry in manifest.files.iter().filter(|f| only.map_or(true, |n| f.dataset == n)) {
        let path = dir.join(&entry.path);
        if !force {
            if let Ok(bytes) = std::fs::read(&path) {
                if manifest.verify(dir, &entry.path, &bytes).is_ok() {
                    eprintln!("ok       {}", entry.path);
                    continue;
                }
            }
        }
        let Some(url) = &entry.url else {
            if entry.vendored {
                return Err(Failure::Io(format!(
                    "{} is missing or corrupt and has no download URL",
                    path.display()
                )));
            }
            continue;
        };
        eprintln!("fetch    {url}");
        let mut body = Vec::new();
        ureq::get(url)
            .call()
            .map_err(|e| Failure::Io(format!("download of {url} failed: {e}")))?
            .into_reader()
            .read_to_end(&mut body)
            .map_err(|e| Failure::Io(format!("download of {url} failed: {e}")))?;
        if entry.gzip {
            let mut raw = Vec::new();
            GzDecoder::new(&body[..])
                .read_to_end(&mut raw)
                .map_err(|e| Failure::Io(format!("{url} is not valid gzip: {e}")))?;
            body = raw;
        }
        if let Some(parent) = path.parent() {
            std::fs::create_dir_all(parent).map_err(|e| io_err(parent, e))?;
        }
        let actual = sha256_hex(&body);
        match &entry.sha256 {
            Some(expected) if *expected != actual => {
                return Err(Failure::Lib(qubosvm::Error::Checksum {
                    path,
                    expected: expected.clone(),
                    actual,
                }))
            }
            Some(_) => {}
            None => {
                let side = digest_path(dir, &entry.path);
                std::fs::write(&side, format!("{actual}\n")).map_err(|e| io_err(&side, e))?;
            }
        }
        std::fs::write(&path, &body).map_err(|e| io_err(&path, e))?;
        eprintln!("saved    {} ({} bytes, sha256 {actual})", entry.path, body.len());
    }
    Ok(())
}
