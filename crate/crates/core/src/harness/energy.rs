//! Package energy from the powercap interface.

use std::fs;
use std::path::{Path, PathBuf};
use std::sync::mpsc::{self, RecvTimeoutError, Sender};
use std::thread::JoinHandle;
use std::time::Duration;

pub const POWERCAP_ROOT: &str = "/sys/class/powercap";
pub const RAPL_ROOT_ENV: &str = "PDDL_MORPH_RAPL_ROOT";
pub const DEFAULT_SAMPLE_INTERVAL: Duration = Duration::from_secs(60);

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum MeterError {
    #[error("energy meter unavailable: {0}")]
    MeterUnavailable(String),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EnergySample {
    pub zone: String,
    pub counter_uj: u64,
    pub max_range_uj: u64,
}

/// Microjoules between two readings of one counter, allowing one wrap.
pub fn energy_delta_uj(before: &EnergySample, after: &EnergySample) -> u64 {
    debug_assert_eq!(before.zone, after.zone);
    if after.counter_uj >= before.counter_uj {
        after.counter_uj - before.counter_uj
    } else if before.max_range_uj == 0 {
        0
    } else {
        let m = before.max_range_uj as i128;
        (after.counter_uj as i128 - before.counter_uj as i128).rem_euclid(m) as u64
    }
}

/// [`energy_delta_uj`] in joules.
pub fn energy_delta(before: &EnergySample, after: &EnergySample) -> f64 {
    energy_delta_uj(before, after) as f64 / 1e6
}

#[derive(Debug, Clone)]
struct Zone {
    id: String,
    dir: PathBuf,
}

/// Package-level RAPL zones found under a powercap root.
#[derive(Debug, Clone)]
pub struct RaplMeter {
    zones: Vec<Zone>,
}

fn read_u64(path: &Path) -> Result<u64, MeterError> {
    let text = fs::read_to_string(path)
        .map_err(|e| MeterError::MeterUnavailable(format!("{}: {e}", path.display())))?;
    text.trim()
        .parse()
        .map_err(|e| MeterError::MeterUnavailable(format!("{}: {e}", path.display())))
}

impl RaplMeter {
    /// Uses `$PDDL_MORPH_RAPL_ROOT` if set, else the system powercap root.
    pub fn from_env() -> Result<Self, MeterError> {
        match std::env::var_os(RAPL_ROOT_ENV) {
            Some(root) => Self::discover(Path::new(&root)),
            None => Self::discover(Path::new(POWERCAP_ROOT)),
        }
    }

    /// Finds `intel-rapl*` zones whose `name` starts with `package` and
    /// checks that each counter is readable.
    pub fn discover(root: &Path) -> Result<Self, MeterError> {
        let entries = fs::read_dir(root)
            .map_err(|e| MeterError::MeterUnavailable(format!("{}: {e}", root.display())))?;
        let mut zones = Vec::new();
        for entry in entries.flatten() {
            let file_name = entry.file_name().to_string_lossy().into_owned();
            if !file_name.starts_with("intel-rapl") {
                continue;
            }
            let dir = entry.path();
            let Ok(name) = fs::read_to_string(dir.join("name")) else {
                continue;
            };
            let name = name.trim();
            if !name.starts_with("package") || !dir.join("energy_uj").exists() {
                continue;
            }
            zones.push(Zone {
                id: name.to_string(),
                dir,
            });
        }
        zones.sort_by(|a, b| a.id.cmp(&b.id));
        zones.dedup_by(|a, b| a.id == b.id);
        if zones.is_empty() {
            return Err(MeterError::MeterUnavailable(format!(
                "no package zone under {}",
                root.display()
            )));
        }
        let meter = RaplMeter { zones };
        meter.sample()?;
        Ok(meter)
    }

    pub fn zone_ids(&self) -> Vec<&str> {
        self.zones.iter().map(|z| z.id.as_str()).collect()
    }

    pub fn read_energy_counter(&self, zone: &str) -> Result<EnergySample, MeterError> {
        let z = self
            .zones
            .iter()
            .find(|z| z.id == zone)
            .ok_or_else(|| MeterError::MeterUnavailable(format!("no zone `{zone}`")))?;
        Self::read_zone(z)
    }

    fn read_zone(z: &Zone) -> Result<EnergySample, MeterError> {
        Ok(EnergySample {
            zone: z.id.clone(),
            counter_uj: read_u64(&z.dir.join("energy_uj"))?,
            max_range_uj: read_u64(&z.dir.join("max_energy_range_uj"))?,
        })
    }

    /// One reading per zone.
    pub fn sample(&self) -> Result<Vec<EnergySample>, MeterError> {
        self.zones.iter().map(Self::read_zone).collect()
    }

    /// Starts a measurement. A background thread samples every `interval`
    /// so counters that wrap more than once over a long run are still
    /// summed correctly.
    pub fn start(&self, interval: Duration) -> Result<Measurement, MeterError> {
        let first = self.sample()?;
        let meter = self.clone();
        let (stop, rx) = mpsc::channel::<()>();
        let handle = std::thread::spawn(move || {
            let mut last = first;
            let mut total_uj: u64 = 0;
            let mut accumulate = |last: &mut Vec<EnergySample>| -> Result<(), MeterError> {
                let now = meter.sample()?;
                for (a, b) in last.iter().zip(&now) {
                    total_uj += energy_delta_uj(a, b);
                }
                *last = now;
                Ok(())
            };
            while let Err(RecvTimeoutError::Timeout) = rx.recv_timeout(interval) {
                accumulate(&mut last)?;
            }
            accumulate(&mut last)?;
            Ok(total_uj)
        });
        Ok(Measurement { stop, handle })
    }
}

/// An in-flight measurement started by [`RaplMeter::start`].
pub struct Measurement {
    stop: Sender<()>,
    handle: JoinHandle<Result<u64, MeterError>>,
}

impl Measurement {
    /// Takes the final reading and returns joules since the start.
    pub fn finish(self) -> Result<f64, MeterError> {
        let _ = self.stop.send(());
        let uj = self
            .handle
            .join()
            .map_err(|_| MeterError::MeterUnavailable("sampler thread panicked".into()))??;
        Ok(uj as f64 / 1e6)
    }
}

/// Writes a fake powercap tree with one package zone, for tests.
pub fn write_synthetic_zone(
    root: &Path,
    dir_name: &str,
    zone: &str,
    counter_uj: u64,
    max_range_uj: u64,
) -> std::io::Result<PathBuf> {
    let dir = root.join(dir_name);
    fs::create_dir_all(&dir)?;
    fs::write(dir.join("name"), format!("{zone}\n"))?;
    fs::write(dir.join("energy_uj"), format!("{counter_uj}\n"))?;
    fs::write(dir.join("max_energy_range_uj"), format!("{max_range_uj}\n"))?;
    Ok(dir)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn s(counter: u64, max: u64) -> EnergySample {
        EnergySample {
            zone: "package-0".into(),
            counter_uj: counter,
            max_range_uj: max,
        }
    }

    #[test]
    fn deltas() {
        let max = 262_143_328_850;
        assert_eq!(energy_delta(&s(1_000_000, max), &s(3_500_000, max)), 2.5);
        assert_eq!(energy_delta_uj(&s(max - 100, max), &s(400, max)), 500);
        assert_eq!(energy_delta(&s(42, max), &s(42, max)), 0.0);
    }

    #[test]
    fn discovers_package_zones_only() {
        let dir = tempfile::tempdir().unwrap();
        write_synthetic_zone(dir.path(), "intel-rapl:0", "package-0", 42, 1000).unwrap();
        write_synthetic_zone(dir.path(), "intel-rapl:0:0", "core", 7, 1000).unwrap();
        fs::create_dir_all(dir.path().join("intel-rapl")).unwrap();
        let m = RaplMeter::discover(dir.path()).unwrap();
        assert_eq!(m.zone_ids(), ["package-0"]);
        assert_eq!(m.read_energy_counter("package-0").unwrap().counter_uj, 42);
        assert!(m.read_energy_counter("core").is_err());
    }

    #[test]
    fn missing_root_is_unavailable() {
        let dir = tempfile::tempdir().unwrap();
        assert!(matches!(
            RaplMeter::discover(&dir.path().join("nope")),
            Err(MeterError::MeterUnavailable(_))
        ));
        assert!(RaplMeter::discover(dir.path()).is_err());
    }

    #[test]
    fn sampler_sums_across_wraps() {
        let dir = tempfile::tempdir().unwrap();
        let z = write_synthetic_zone(dir.path(), "intel-rapl:0", "package-0", 900, 1000).unwrap();
        let m = RaplMeter::discover(dir.path()).unwrap();
        let run = m.start(Duration::from_millis(20)).unwrap();
        // 900 -> 300 (wrap, +400), then -> 100 (wrap, +800); a single
        // before/after pair would see only one wrap (+200)
        std::thread::sleep(Duration::from_millis(10));
        fs::write(z.join("energy_uj"), "300").unwrap();
        std::thread::sleep(Duration::from_millis(60));
        fs::write(z.join("energy_uj"), "100").unwrap();
        let j = run.finish().unwrap();
        assert_eq!((j * 1e6).round() as u64, 1200);
    }
}
