# Utils package for wgm-scatter
