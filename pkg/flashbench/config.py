# -*- coding: utf-8 -*-
# See LICENSE.txt for licensing terms

"""Singleton config object.

Nothing is read implicitly: only a file passed with ``--config`` is
parsed, so every run is fully described by its command line.
"""

import configparser

import yaml


def getValue(section, key, default=None):
    section = section.lower()
    key = key.lower()
    try:
        return yaml.safe_load(conf.get(section, key))
    except (configparser.Error, yaml.YAMLError):
        return default


class ConfigError(Exception):
    def __init__(self, section, msg):
        super(ConfigError, self).__init__('[%s] %s' % (section, msg))
        self.section = section
        self.msg = msg


conf = configparser.ConfigParser()


def parseConfig(extracf=None):
    global conf
    conf = configparser.ConfigParser()
    if extracf:
        try:
            read = conf.read([extracf])
        except configparser.Error as e:
            raise ConfigError('general', str(e))
        if not read:
            raise ConfigError('general', 'cannot read config file %s' % extracf)
