//! Sweep-grid specifications: `[name=]start:stop:steps` with optional
//! geometric spacing.

#[derive(Debug, Clone, PartialEq)]
pub struct GridSpec {
    pub param: Option<String>,
    pub start: f64,
    pub stop: f64,
    pub steps: usize,
}

impl GridSpec {
    /// Parse `start:stop:steps` or `param=start:stop:steps`.
    pub fn parse(text: &str) -> Result<Self, String> {
        let (param, rest) = match text.split_once('=') {
            Some((name, rest)) => (Some(name.trim().to_string()), rest),
            None => (None, text),
        };
        let parts: Vec<&str> = rest.split(':').collect();
        if parts.len() != 3 {
            return Err(format!("grid `{text}` must be [name=]start:stop:steps"));
        }
        let start: f64 = parts[0]
            .parse()
            .map_err(|_| format!("grid start `{}` is not a number", parts[0]))?;
        let stop: f64 = parts[1]
            .parse()
            .map_err(|_| format!("grid stop `{}` is not a number", parts[1]))?;
        let steps: usize = parts[2]
            .parse()
            .map_err(|_| format!("grid steps `{}` is not a count", parts[2]))?;
        if steps == 0 {
            return Err("grid must have at least one step".into());
        }
        if !(start.is_finite() && stop.is_finite()) {
            return Err("grid endpoints must be finite".into());
        }
        Ok(Self {
            param,
            start,
            stop,
            steps,
        })
    }

    /// Evenly spaced points (geometrically when `log` is set), inclusive of
    /// both endpoints.
    pub fn points(&self, log: bool) -> Result<Vec<f64>, String> {
        if self.steps == 1 {
            return Ok(vec![self.start]);
        }
        let n = self.steps as f64 - 1.0;
        if log {
            if self.start <= 0.0 || self.stop <= 0.0 {
                return Err("logarithmic grid requires positive endpoints".into());
            }
            let ratio = (self.stop / self.start).powf(1.0 / n);
            Ok((0..self.steps)
                .map(|i| self.start * ratio.powi(i as i32))
                .collect())
        } else {
            let step = (self.stop - self.start) / n;
            Ok((0..self.steps).map(|i| self.start + step * i as f64).collect())
        }
    }
}
