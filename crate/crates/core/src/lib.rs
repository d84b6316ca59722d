pub mod fit;
pub mod grid;
pub mod kernel;
pub mod moderesolvent;
pub mod resolventscan;
pub mod semigroupsim;
pub mod spectrum;

#[cfg(doctest)]
mod guide {
    #[doc = include_str!("../../../README.md")]
    pub struct Readme;
    #[doc = include_str!("../../../book/src/introduction.md")]
    pub struct Introduction;
    #[doc = include_str!("../../../book/src/modes.md")]
    pub struct Modes;
    #[doc = include_str!("../../../book/src/spectrum.md")]
    pub struct Spectrum;
    #[doc = include_str!("../../../book/src/resolvent.md")]
    pub struct Resolvent;
    #[doc = include_str!("../../../book/src/growth.md")]
    pub struct Growth;
    #[doc = include_str!("../../../book/src/decay.md")]
    pub struct Decay;
    #[doc = include_str!("../../../book/src/cli.md")]
    pub struct Cli;
}
