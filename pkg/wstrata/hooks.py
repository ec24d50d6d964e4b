app_name = "wstrata"
app_title = "WStrata"
app_publisher = "GWS"
app_description = "Weierstrass curves, theta functions and Jacobi inversion checks on theta-divisor strata"
app_email = "tech@guitaa.com"
app_license = "mit"

# Pipeline stages
# ---------------
# stage name -> dotted path of the stage function, run in the order given

pipeline_stages = {
	"semigroup": "wstrata.services.pipeline.stages.semigroup_stage",
	"basis": "wstrata.services.pipeline.stages.basis_stage",
	"periods": "wstrata.services.pipeline.stages.periods_stage",
	"theta": "wstrata.services.pipeline.stages.theta_stage",
	"riemann": "wstrata.services.pipeline.stages.riemann_stage",
	"invert": "wstrata.services.pipeline.stages.invert_stage",
	"pentagonal": "wstrata.services.pipeline.stages.pentagonal_stage",
}

# stages that need the output of earlier ones
stage_requires = {
	"theta": ["periods"],
	"riemann": ["periods"],
	"invert": ["periods", "riemann"],
	"pentagonal": ["periods", "riemann"],
}

default_stages = ["semigroup", "basis", "periods", "theta", "riemann", "invert"]

# stages only run with --extended (or WSTRATA_EXTENDED=1)
extended_stages = ["pentagonal"]

# Period cache
# ------------

period_cache_dir = "~/.cache/wstrata/periods"
period_cache_suffix = ".periods"
